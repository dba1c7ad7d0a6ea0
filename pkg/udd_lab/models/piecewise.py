from dataclasses import dataclass
from typing import List, Sequence, Tuple

import mpmath

from udd_lab.exceptions import InvalidParameterError


@dataclass(frozen=True)
class PiecewisePoly:
    """Polynomials in the global variable s, one per segment [s_j, s_{j+1}].

    Coefficients are mpmath numbers in ascending powers of s.
    """
    breakpoints: Tuple
    coefficients: Tuple[Tuple, ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.breakpoints) - 1:
            raise InvalidParameterError("need exactly one polynomial per segment")

    @classmethod
    def constant(cls, breakpoints: Sequence, value=1) -> "PiecewisePoly":
        return cls(tuple(breakpoints), tuple((mpmath.mpf(value),) for _ in range(len(breakpoints) - 1)))

    @property
    def segments(self) -> int:
        return len(self.coefficients)

    def segment_of(self, s) -> int:
        for j in range(self.segments - 1, -1, -1):
            if s >= self.breakpoints[j]:
                return j
        return 0

    @staticmethod
    def _horner(coeffs: Sequence, s):
        value = mpmath.mpf(0)
        for c in reversed(coeffs):
            value = value * s + c
        return value

    def evaluate(self, s):
        return self._horner(self.coefficients[self.segment_of(s)], s)

    def antiderivative(self, weights: Sequence[int]) -> "PiecewisePoly":
        """G(s) = ∫₀^s w(u)·P(u) du with w constant on each segment."""
        if len(weights) != self.segments:
            raise InvalidParameterError("need one weight per segment")
        start_value = mpmath.mpf(0)
        new_coeffs: List[Tuple] = []
        for j, (coeffs, w) in enumerate(zip(self.coefficients, weights)):
            lifted = [mpmath.mpf(0)] + [w * c / (k + 1) for k, c in enumerate(coeffs)]
            lifted[0] = start_value - self._horner(lifted, self.breakpoints[j])
            new_coeffs.append(tuple(lifted))
            start_value = self._horner(lifted, self.breakpoints[j + 1])
        return PiecewisePoly(self.breakpoints, tuple(new_coeffs))

    def continuity_defect(self):
        """Largest jump across interior breakpoints."""
        worst = mpmath.mpf(0)
        for j in range(1, self.segments):
            s = self.breakpoints[j]
            jump = abs(self._horner(self.coefficients[j], s) - self._horner(self.coefficients[j - 1], s))
            worst = max(worst, jump)
        return worst
