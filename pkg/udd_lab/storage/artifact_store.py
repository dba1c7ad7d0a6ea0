import json
import logging
import math
from pathlib import Path
from typing import Any, Optional

import pandas as pd

from udd_lab import config

logger = logging.getLogger(__name__)


def resolve_output_dir(out: Optional[Path] = None) -> Path:
    """Directory for artifacts: --out if given, else the configured default. Created on demand."""
    directory = Path(out) if out is not None else config.default_output_dir()
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.error(f"Cannot create output directory {directory}: {e}")
        raise
    return directory


def curve_filename(n_pulses: int, eta: float, fixed_t1: bool = False) -> str:
    prefix = "fixed_t1" if fixed_t1 else "delta"
    return f"{prefix}_N{n_pulses}_eta{eta:g}.csv"


def frame_to_csv(frame: pd.DataFrame) -> str:
    """17-significant-digit CSV with LF line endings and no index."""
    return frame.to_csv(index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(frame_to_csv(frame), encoding="utf-8", newline="")
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path
    except OSError as e:
        logger.error(f"Error writing {path}: {e}")
        raise


def _null_non_finite(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _null_non_finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_null_non_finite(v) for v in value]
    return value


def dumps_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, non-finite floats written as null."""
    return json.dumps(_null_non_finite(payload), sort_keys=True, allow_nan=False, indent=2) + "\n"


def write_json(payload: Any, path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(dumps_json(payload), encoding="utf-8", newline="")
        logger.info(f"Wrote {path}")
        return path
    except OSError as e:
        logger.error(f"Error writing {path}: {e}")
        raise
