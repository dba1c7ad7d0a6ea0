import os
from pathlib import Path

# Output location
OUTPUT_DIR_ENV = "UDD_LAB_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "artifacts/udd_lab"


def default_output_dir() -> Path:
    """Directory used when the CLI is not given --out."""
    return Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))


# Linear-algebra tolerances
HERMITIAN_TOL = 1e-10
DENSITY_TOL = 1e-10
UNITARITY_TOL = 1e-10

# Absolute slack for every proved inequality
INEQUALITY_TOL = 1e-9

# Bounding-function evaluation
MIN_RETAINED_DIGITS = 11
DOUBLE_DIGITS = 15.95
SERIES_REL_STOP = 1e-18
SERIES_MAX_TERMS = 200

# Dyson coefficients
DYSON_MAX_ORDER = 8
BREAKPOINT_DPS = 40
VANISHING_TOL = 1e-10

# Bath model
BATH_DIM_DEFAULT = 4
BATH_DIM_MIN = 2
BATH_DIM_MAX = 32

# Order-scaling fits
SCALING_DPS = 50
SCALING_NORM_FLOOR = 1e-35
SCALING_SLOPE_TOL = 0.15
SCALING_EPS_MIN = 1e-3
SCALING_EPS_MAX = 1e-2
SCALING_POINTS = 8

# Figure grids
FIGURE_N_GRID = (2, 5, 10, 20)
FIGURE_ETA_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
EPS_MIN = 1e-4
EPS_MAX = 10.0
EPS_POINTS = 60

# simulate defaults
SIM_DIM = 4
SIM_N_PULSES = 4
SIM_ETA = 1.0
SIM_EPSILON = 0.1
SIM_TRIALS = 100
SIM_SEED = 7

# CSV rendering
CSV_FLOAT_FORMAT = "%.17g"
