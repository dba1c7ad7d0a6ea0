import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

from udd_lab import config
from udd_lab.exceptions import InvalidParameterError

STATE_POLICIES = ("haar", "plus")


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return value


@dataclass(frozen=True)
class ExperimentSpec:
    bath_dim: int = config.SIM_DIM
    n_pulses: int = config.SIM_N_PULSES
    eta: float = config.SIM_ETA
    epsilon: float = config.SIM_EPSILON
    seed: int = config.SIM_SEED
    trials: int = config.SIM_TRIALS
    initial_state: str = "haar"

    def __post_init__(self):
        if not config.BATH_DIM_MIN <= self.bath_dim <= config.BATH_DIM_MAX:
            raise InvalidParameterError(
                f"bath_dim must lie in [{config.BATH_DIM_MIN}, {config.BATH_DIM_MAX}], got {self.bath_dim}"
            )
        if self.n_pulses < 0:
            raise InvalidParameterError(f"n_pulses must be non-negative, got {self.n_pulses}")
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be at least 1, got {self.trials}")
        for name in ("eta", "epsilon"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameterError(f"{name} must be finite and non-negative, got {value}")
        if self.seed < 0:
            raise InvalidParameterError(f"seed must be non-negative, got {self.seed}")
        if self.initial_state not in STATE_POLICIES:
            raise InvalidParameterError(f"initial_state must be one of {STATE_POLICIES}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrialRecord:
    index: int
    seed: int
    distance: float
    delta_n: float
    bound: float
    b_norm_minus: float
    b_abs: Tuple[float, float, float, float]
    margin: float

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "D": self.distance,
            "delta_N": _finite_or_none(self.delta_n),
            "bound": self.bound,
            "b_norm_minus": self.b_norm_minus,
            "b_abs": dict(zip(("pp", "pm", "mp", "mm"), self.b_abs)),
            "margin": _finite_or_none(self.margin),
        }


@dataclass(frozen=True)
class VerificationReport:
    spec: ExperimentSpec
    trials: List[TrialRecord]
    min_margin: float
    passed: bool
    failed_seeds: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "trials": [t.to_dict() for t in self.trials],
            "min_margin": _finite_or_none(self.min_margin),
            "pass": self.passed,
            "failed_seeds": list(self.failed_seeds),
        }


@dataclass(frozen=True)
class ScalingFit:
    n_pulses: int
    timing: str
    times: List[float]
    norms: List[float]
    slope: Optional[float]
    intercept: Optional[float]
    expected_slope: int
    degenerate: bool = False

    @property
    def within_tolerance(self) -> bool:
        if self.degenerate or self.slope is None:
            return False
        return abs(self.slope - self.expected_slope) <= config.SCALING_SLOPE_TOL

    def to_dict(self) -> dict:
        return {
            "n_pulses": self.n_pulses,
            "timing": self.timing,
            "slope": self.slope,
            "intercept": self.intercept,
            "expected_slope": self.expected_slope,
            "degenerate": self.degenerate,
            "within_tolerance": self.within_tolerance,
            "points": len(self.times),
        }
