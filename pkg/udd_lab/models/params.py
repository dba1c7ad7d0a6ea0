import math
from dataclasses import dataclass

from udd_lab.exceptions import InvalidParameterError


def _check_non_negative(name: str, value: float):
    if not (math.isfinite(value) and value >= 0):
        raise InvalidParameterError(f"{name} must be finite and non-negative, got {value}")


@dataclass(frozen=True)
class BoundParams:
    """Dimensionless inputs (N, η, ε) of the bounding function, ε = J₀T."""
    n_pulses: int
    eta: float
    epsilon: float

    def __post_init__(self):
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 0:
            raise InvalidParameterError(f"n_pulses must be a non-negative integer, got {self.n_pulses}")
        _check_non_negative("eta", self.eta)
        _check_non_negative("epsilon", self.epsilon)


@dataclass(frozen=True)
class FixedIntervalParams:
    """Inputs (N, η, ε₁) when the first pulse interval t₁ is held fixed, ε₁ = J₀t₁."""
    n_pulses: int
    eta: float
    epsilon1: float

    def __post_init__(self):
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 1:
            raise InvalidParameterError(f"n_pulses must be a positive integer, got {self.n_pulses}")
        _check_non_negative("eta", self.eta)
        _check_non_negative("epsilon1", self.epsilon1)
