import math
from dataclasses import dataclass
from typing import Tuple

from udd_lab.exceptions import InvalidParameterError

TIMINGS = ("udd", "periodic", "cpmg", "custom")

# labelled instants may differ from their closed form by this much, relative to T
LABEL_MATCH_TOL = 1e-12


def closed_form_fractions(timing: str, n_pulses: int) -> Tuple[float, ...]:
    """t_j / T for a named timing family."""
    if timing == "udd":
        return tuple(math.sin(j * math.pi / (2 * n_pulses + 2)) ** 2 for j in range(1, n_pulses + 1))
    if timing == "periodic":
        return tuple(j / (n_pulses + 1) for j in range(1, n_pulses + 1))
    if timing == "cpmg":
        return tuple((j - 0.5) / n_pulses for j in range(1, n_pulses + 1))
    raise InvalidParameterError(f"timing {timing!r} has no closed form")


@dataclass(frozen=True)
class PulseSequence:
    """Instantaneous pi-pulse instants on [0, total_time].

    `timing` records the closed form the instants came from so that the
    Dyson engine can regenerate them at extended precision; it is not part
    of the JSON interchange format. A labelled sequence must carry the
    instants of its label.
    """
    total_time: float
    instants: Tuple[float, ...]
    timing: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "instants", tuple(float(t) for t in self.instants))
        if not (math.isfinite(self.total_time) and self.total_time > 0):
            raise InvalidParameterError(f"total_time must be positive and finite, got {self.total_time}")
        if self.timing not in TIMINGS:
            raise InvalidParameterError(f"timing must be one of {TIMINGS}, got {self.timing!r}")
        previous = 0.0
        for t in self.instants:
            if not (previous < t < self.total_time):
                raise InvalidParameterError(
                    f"instants must be strictly increasing inside (0, {self.total_time}), got {self.instants}"
                )
            previous = t
        if self.timing != "custom":
            self._check_label()

    def _check_label(self):
        expected = closed_form_fractions(self.timing, self.n_pulses)
        worst = max((abs(t - self.total_time * s) for t, s in zip(self.instants, expected)), default=0.0)
        if worst > LABEL_MATCH_TOL * self.total_time:
            raise InvalidParameterError(
                f"instants {self.instants} do not match {self.timing} timing "
                f"(off by {worst:.3g}); use timing='custom' for arbitrary instants"
            )

    @property
    def n_pulses(self) -> int:
        return len(self.instants)

    def to_dict(self) -> dict:
        return {"total_time": self.total_time, "instants": list(self.instants)}

    @classmethod
    def from_dict(cls, payload: dict) -> "PulseSequence":
        try:
            return cls(total_time=float(payload["total_time"]), instants=tuple(payload["instants"]))
        except KeyError as e:
            raise InvalidParameterError(f"sequence JSON is missing field {e}") from e
        except InvalidParameterError:
            raise
        except (TypeError, ValueError) as e:
            raise InvalidParameterError(f"sequence JSON has a malformed field: {e}") from e
