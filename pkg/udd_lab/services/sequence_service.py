import logging
import math
from bisect import bisect_right
from typing import List, Tuple

import mpmath

from udd_lab import config
from udd_lab.exceptions import InvalidParameterError
from udd_lab.models.sequence import PulseSequence

logger = logging.getLogger(__name__)


def _check_pulses(n_pulses: int, minimum: int = 1):
    if int(n_pulses) != n_pulses or n_pulses < minimum:
        raise InvalidParameterError(f"n_pulses must be an integer >= {minimum}, got {n_pulses}")


def _check_total_time(total_time: float):
    if not (math.isfinite(total_time) and total_time > 0):
        raise InvalidParameterError(f"total_time must be positive and finite, got {total_time}")


def udd_sequence(n_pulses: int, total_time: float) -> PulseSequence:
    """UDD instants t_j = T·sin²(jπ/(2N+2)), j = 1..N."""
    _check_pulses(n_pulses)
    _check_total_time(total_time)
    denominator = 2 * n_pulses + 2
    instants = tuple(total_time * math.sin(j * math.pi / denominator) ** 2 for j in range(1, n_pulses + 1))
    logger.debug(f"UDD sequence N={n_pulses}, T={total_time}: {instants}")
    return PulseSequence(total_time, instants, timing="udd")


def periodic_sequence(n_pulses: int, total_time: float) -> PulseSequence:
    """Equally spaced pulses t_j = jT/(N+1)."""
    _check_pulses(n_pulses)
    _check_total_time(total_time)
    instants = tuple(j * total_time / (n_pulses + 1) for j in range(1, n_pulses + 1))
    return PulseSequence(total_time, instants, timing="periodic")


def cpmg_sequence(n_pulses: int, total_time: float) -> PulseSequence:
    """Carr-Purcell timing t_j = (j - 1/2)T/N."""
    _check_pulses(n_pulses)
    _check_total_time(total_time)
    instants = tuple((j - 0.5) * total_time / n_pulses for j in range(1, n_pulses + 1))
    return PulseSequence(total_time, instants, timing="cpmg")


_BUILDERS = {
    "udd": udd_sequence,
    "periodic": periodic_sequence,
    "cpmg": cpmg_sequence,
}


def build_sequence(timing: str, n_pulses: int, total_time: float) -> PulseSequence:
    """Dispatch on timing; zero pulses gives free evolution."""
    if timing not in _BUILDERS:
        raise InvalidParameterError(f"unknown timing {timing!r}, expected one of {sorted(_BUILDERS)}")
    _check_pulses(n_pulses, minimum=0)
    if n_pulses == 0:
        _check_total_time(total_time)
        return PulseSequence(total_time, (), timing=timing)
    return _BUILDERS[timing](n_pulses, total_time)


def switching_function(seq: PulseSequence, t: float) -> int:
    """f(t) = ±1, flipping at every instant; right-continuous."""
    if not 0 <= t <= seq.total_time:
        raise InvalidParameterError(f"t must lie in [0, {seq.total_time}], got {t}")
    flips = bisect_right(seq.instants, t)
    return -1 if flips % 2 else 1


def switching_segments(seq: PulseSequence) -> List[Tuple[float, int]]:
    """(duration, sign) of every free-evolution interval, in time order."""
    edges = (0.0,) + seq.instants + (seq.total_time,)
    return [(edges[j + 1] - edges[j], -1 if j % 2 else 1) for j in range(len(edges) - 1)]


def switching_integral(seq: PulseSequence) -> float:
    return math.fsum(duration * sign for duration, sign in switching_segments(seq))


def q_factor(n_pulses: int) -> float:
    """q(N) = csc²(π/(2N+2)), the ratio T/t₁ for UDD."""
    _check_pulses(n_pulses)
    return 1.0 / math.sin(math.pi / (2 * n_pulses + 2)) ** 2


def q_factor_asymptotic(n_pulses: int) -> float:
    _check_pulses(n_pulses)
    return ((2 * n_pulses + 2) / math.pi) ** 2 + 1.0 / 3.0


def relative_instants_mp(seq: PulseSequence, dps: int = config.BREAKPOINT_DPS) -> Tuple:
    """Breakpoints 0 = s₀ < δ₁ < … < δ_N < 1 as mpmath numbers.

    Closed-form timings are regenerated at `dps` digits; custom sequences
    fall back to the stored doubles.
    """
    n = seq.n_pulses
    with mpmath.workdps(dps):
        if seq.timing == "udd":
            inner = [mpmath.sin(j * mpmath.pi / (2 * n + 2)) ** 2 for j in range(1, n + 1)]
        elif seq.timing == "periodic":
            inner = [mpmath.mpf(j) / (n + 1) for j in range(1, n + 1)]
        elif seq.timing == "cpmg":
            inner = [(mpmath.mpf(j) - mpmath.mpf(1) / 2) / n for j in range(1, n + 1)]
        else:
            inner = [mpmath.mpf(t) / mpmath.mpf(seq.total_time) for t in seq.instants]
        return (mpmath.mpf(0),) + tuple(+x for x in inner) + (mpmath.mpf(1),)
