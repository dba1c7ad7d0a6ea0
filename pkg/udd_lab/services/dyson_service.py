"""Exact nested Dyson coefficients F_α for piecewise-constant switching.

In relative time s = t/T the switching function is ±1 on each segment
between breakpoints, so every nested integral is an exact piecewise
polynomial. Breakpoints are carried at extended precision.
"""
import logging
from itertools import product
from typing import Dict, List, Optional, Tuple

import mpmath
import numpy as np

from udd_lab import config
from udd_lab.exceptions import InvalidParameterError, OrderCapExceededError
from udd_lab.models.bath import BathModel
from udd_lab.models.dyson import LETTERS, AlphaWord, VanishingReport
from udd_lab.models.piecewise import PiecewisePoly
from udd_lab.models.sequence import PulseSequence
from udd_lab.services.sequence_service import build_sequence, relative_instants_mp

logger = logging.getLogger(__name__)

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def _check_order(order: int, minimum: int = 1):
    if order < minimum:
        raise InvalidParameterError(f"order must be at least {minimum}, got {order}")
    if order > config.DYSON_MAX_ORDER:
        raise OrderCapExceededError(f"order {order} exceeds the cap {config.DYSON_MAX_ORDER}")


def enumerate_words(order: int) -> List[AlphaWord]:
    """All words of one order, lexicographic with 0 < z."""
    return [AlphaWord(letters) for letters in product(LETTERS, repeat=order)]


def _letter_weights(letter: str, segments: int) -> List[int]:
    if letter == "0":
        return [1] * segments
    return [1 if j % 2 == 0 else -1 for j in range(segments)]


def _prefix_table(seq: PulseSequence, max_order: int, dps: int) -> Dict[Tuple[str, ...], mpmath.mpf]:
    """F for every word up to `max_order`, sharing inner integrals between words."""
    values: Dict[Tuple[str, ...], mpmath.mpf] = {}
    with mpmath.workdps(dps):
        breakpoints = relative_instants_mp(seq, dps)
        level: Dict[Tuple[str, ...], PiecewisePoly] = {(): PiecewisePoly.constant(breakpoints)}
        for _ in range(max_order):
            next_level = {}
            for prefix, poly in level.items():
                for letter in LETTERS:
                    integrated = poly.antiderivative(_letter_weights(letter, poly.segments))
                    next_level[prefix + (letter,)] = integrated
                    values[prefix + (letter,)] = integrated.evaluate(mpmath.mpf(1))
            level = next_level
    return values


def f_alpha_mp(word: AlphaWord, seq: PulseSequence, dps: int = config.BREAKPOINT_DPS) -> mpmath.mpf:
    """F_α at `dps` digits by iterated piecewise antiderivatives, α₁ innermost."""
    _check_order(word.order)
    with mpmath.workdps(dps):
        breakpoints = relative_instants_mp(seq, dps)
        poly = PiecewisePoly.constant(breakpoints)
        for letter in word.letters:
            poly = poly.antiderivative(_letter_weights(letter, poly.segments))
        return poly.evaluate(mpmath.mpf(1))


def f_alpha_exact(word: AlphaWord, seq: PulseSequence) -> float:
    return float(f_alpha_mp(word, seq))


def verify_vanishing_orders(
    n_pulses: int, max_order: int, timing: str = "udd", tol: float = config.VANISHING_TOL
) -> VanishingReport:
    """Check F_α ≈ 0 for every odd-z word of order ≤ max_order."""
    if max_order > n_pulses:
        raise InvalidParameterError(f"max_order {max_order} exceeds n_pulses {n_pulses}")
    _check_order(max_order)
    seq = build_sequence(timing, n_pulses, 1.0)
    values = _prefix_table(seq, max_order, config.BREAKPOINT_DPS)

    words_checked = 0
    max_abs = 0.0
    argmax: Optional[str] = None
    for order in range(1, max_order + 1):
        for word in enumerate_words(order):
            if word.z_count % 2 == 0:
                continue
            words_checked += 1
            value = abs(float(values[word.letters]))
            if argmax is None or value > max_abs:
                max_abs, argmax = value, str(word)

    passed = max_abs < tol
    logger.info(
        f"{timing} N={n_pulses}: {words_checked} odd-z words up to order {max_order}, "
        f"max |F| = {max_abs:.3e} at {argmax}, {'pass' if passed else 'FAIL'}"
    )
    return VanishingReport(
        n_pulses=n_pulses,
        max_order=max_order,
        timing=timing,
        words_checked=words_checked,
        max_abs_f=max_abs,
        argmax_word=argmax,
        passed=passed,
    )


def _letter_operators(bath: BathModel) -> Dict[str, np.ndarray]:
    identity = np.eye(2, dtype=complex)
    return {"0": np.kron(identity, bath.b0), "z": np.kron(SIGMA_Z, bath.bz)}


def _terms_by_order(bath: BathModel, seq: PulseSequence, max_order: int) -> List[np.ndarray]:
    dim = 2 * bath.dim
    values = _prefix_table(seq, max_order, config.BREAKPOINT_DPS) if max_order else {}
    operators = _letter_operators(bath)
    terms = [np.eye(dim, dtype=complex)]
    for order in range(1, max_order + 1):
        total = np.zeros((dim, dim), dtype=complex)
        for word in enumerate_words(order):
            q_word = np.eye(dim, dtype=complex)
            # later letters act on the left
            for letter in word.letters:
                q_word = operators[letter] @ q_word
            total += float(values[word.letters]) * q_word
        terms.append((-1j * seq.total_time) ** order * total)
    return terms


def dyson_term(bath: BathModel, seq: PulseSequence, order: int) -> np.ndarray:
    """Order-n term (−iT)ⁿ Σ_{|α|=n} F_α·Q_α of the toggling-frame series."""
    if order == 0:
        return np.eye(2 * bath.dim, dtype=complex)
    _check_order(order)
    return _terms_by_order(bath, seq, order)[order]


def dyson_partial_sum(bath: BathModel, seq: PulseSequence, max_order: int) -> np.ndarray:
    """Σ_{n ≤ max_order} of the series; differs from U(T) by O(T^{max_order+1})."""
    if max_order < 0:
        raise InvalidParameterError(f"max_order must be non-negative, got {max_order}")
    if max_order > config.DYSON_MAX_ORDER:
        raise OrderCapExceededError(f"order {max_order} exceeds the cap {config.DYSON_MAX_ORDER}")
    return sum(_terms_by_order(bath, seq, max_order))
