from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from udd_lab.exceptions import InvalidParameterError

STOCHASTIC_COMMANDS = ("simulate", "scaling")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n_values: Tuple[int, ...] = ()
    eta_values: Tuple[float, ...] = ()
    eps_values: Tuple[float, ...] = ()
    seed: Optional[int] = None
    trials: int = 1
    out: Optional[Path] = None
    output_format: str = "csv"
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("n_values", "eta_values", "eps_values"):
            if self.subcommand == "bound" and not getattr(self, name):
                raise InvalidParameterError(f"{name} must be non-empty")
        if self.subcommand in STOCHASTIC_COMMANDS and self.seed is None:
            raise InvalidParameterError(f"{self.subcommand} needs a seed")
        if self.output_format not in ("csv", "json"):
            raise InvalidParameterError(f"format must be csv or json, got {self.output_format!r}")
