"""Analytic bounding functions for UDD under pure dephasing.

All inputs are dimensionless: ε = J₀T and η = J_z/J₀. The residual Δ_N is
evaluated in log space so that large ε·η never overflows before the final
exponentiation.
"""
import logging
import math
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import brentq

from udd_lab import config
from udd_lab.exceptions import BoundOverflowError, InvalidParameterError
from udd_lab.models.params import BoundParams, FixedIntervalParams
from udd_lab.services.sequence_service import q_factor

logger = logging.getLogger(__name__)

# log of the largest finite double
LOG_MAX_FLOAT = math.log(np.finfo(float).max)


def _check_non_negative(**values):
    for name, value in values.items():
        if not (math.isfinite(value) and value >= 0):
            raise InvalidParameterError(f"{name} must be finite and non-negative, got {value}")


def _safe_exp(log_value: float, what: str) -> float:
    if log_value > LOG_MAX_FLOAT:
        raise BoundOverflowError(f"{what} overflows double precision (log value {log_value:.6g})")
    return math.exp(log_value)


def bounding_series_S(j0: float, jz: float, t: float) -> float:
    """S = exp((J₀ + J_z)T)."""
    _check_non_negative(j0=j0, jz=jz, t=t)
    return _safe_exp((j0 + jz) * t, "S")


def dyson_term_bound(j0: float, jz: float, t: float, order: int) -> float:
    """Tⁿ Σ_k J₀^{n−k} J_z^k / (k!(n−k)!), the norm bound of the order-n Dyson term."""
    _check_non_negative(j0=j0, jz=jz, t=t)
    if order < 0:
        raise InvalidParameterError(f"order must be non-negative, got {order}")
    total = math.fsum(
        j0 ** (order - k) * jz ** k / (math.factorial(k) * math.factorial(order - k)) for k in range(order + 1)
    )
    return t ** order * total


def bounding_series_partial(j0: float, jz: float, t: float, max_order: int) -> float:
    """Double-sum form of S truncated after order `max_order`."""
    return math.fsum(dyson_term_bound(j0, jz, t, n) for n in range(max_order + 1))


def log_s_minus(eta: float, epsilon: float) -> float:
    """log[exp(ε)·sinh(εη)]; −inf when either argument is zero."""
    _check_non_negative(eta=eta, epsilon=epsilon)
    if eta == 0 or epsilon == 0:
        return -math.inf
    # exp(ε)sinh(εη) = ½·exp(ε(1+η))·(1 − exp(−2εη))
    return epsilon * (1 + eta) - math.log(2) + math.log(-math.expm1(-2 * epsilon * eta))


def s_minus(eta: float, epsilon: float) -> float:
    return _safe_exp(log_s_minus(eta, epsilon), "S_-")


def log_p_coefficient(l: int, eta: float) -> float:
    """log p_l(η), p_l(η) = [(1+η)^l − (1−η)^l]/(2·l!)."""
    if l < 0:
        raise InvalidParameterError(f"l must be non-negative, got {l}")
    _check_non_negative(eta=eta)
    if l == 0 or eta == 0:
        return -math.inf
    if eta < 1:
        # 1 − r^l with r = (1−η)/(1+η) in (0, 1)
        one_minus = -math.expm1(l * math.log1p(-2 * eta / (1 + eta)))
    elif eta == 1:
        one_minus = 1.0
    else:
        # r is negative; |r|^l = exp(l·log1p(−2/(1+η)))
        log_abs_power = l * math.log1p(-2 / (1 + eta))
        one_minus = -math.expm1(log_abs_power) if l % 2 == 0 else 1.0 + math.exp(log_abs_power)
    return l * math.log1p(eta) + math.log(one_minus) - math.log(2) - math.lgamma(l + 1)


def p_coefficient(l: int, eta: float) -> float:
    return _safe_exp(log_p_coefficient(l, eta), "p_l")


def d_coefficient(k: int, j0: float, jz: float) -> float:
    """d_k = [(J₀+J_z)^k − (J₀−J_z)^k]/(2k!) = p_k(J_z/J₀)·J₀^k."""
    _check_non_negative(j0=j0, jz=jz)
    if j0 == 0:
        return 0.0 if k % 2 == 0 else jz ** k / math.factorial(k)
    return p_coefficient(k, jz / j0) * j0 ** k


def _log_term(n: int, eta: float, log_eps: float) -> float:
    return log_p_coefficient(n, eta) + n * log_eps


def _log_series_tail(params: BoundParams, max_terms: int) -> float:
    """log Σ_{n>N} p_n ε^n with the relative stopping rule."""
    log_eps = math.log(params.epsilon)
    log_sum = -math.inf
    for n in range(params.n_pulses + 1, params.n_pulses + 1 + max_terms):
        log_t = _log_term(n, params.eta, log_eps)
        if log_t < log_sum + math.log(config.SERIES_REL_STOP):
            break
        log_sum = float(np.logaddexp(log_sum, log_t))
    return log_sum


def log_delta_bound(params: BoundParams) -> float:
    """log Δ_N(η, ε); −inf when Δ vanishes identically."""
    if params.eta == 0 or params.epsilon == 0:
        return -math.inf
    log_s = log_s_minus(params.eta, params.epsilon)
    log_eps = math.log(params.epsilon)
    covered = math.fsum(
        math.exp(_log_term(n, params.eta, log_eps) - log_s) for n in range(1, params.n_pulses + 1)
    )
    remaining = 1.0 - covered
    if remaining > 0 and math.log10(remaining) >= -(config.DOUBLE_DIGITS - config.MIN_RETAINED_DIGITS):
        logger.debug(f"closed form for {params}: {math.log10(remaining):.2f} decades retained")
        return log_s + math.log(remaining)
    logger.debug(f"closed form cancels for {params}, summing the tail series")
    return _log_series_tail(params, config.SERIES_MAX_TERMS)


def delta_bound(params: BoundParams) -> float:
    """Δ_N(η, ε) = S_−(η, ε) − Σ_{n≤N} p_n(η)εⁿ, never negative."""
    return max(0.0, _safe_exp(log_delta_bound(params), "Delta_N"))


def delta_bound_closed_form(params: BoundParams) -> float:
    """Direct subtraction; loses digits when Δ_N ≪ S_−."""
    head = math.fsum(
        p_coefficient(n, params.eta) * params.epsilon ** n for n in range(1, params.n_pulses + 1)
    )
    return max(0.0, s_minus(params.eta, params.epsilon) - head)


def delta_bound_series(params: BoundParams, max_terms: int = config.SERIES_MAX_TERMS) -> float:
    """Tail sum Σ_{n=N+1} p_n(η)εⁿ, at most `max_terms` terms."""
    if params.eta == 0 or params.epsilon == 0:
        return 0.0
    return _safe_exp(_log_series_tail(params, max_terms), "Delta_N series")


def delta_bound_fixed_interval(params: FixedIntervalParams) -> float:
    """Δ_N(η, ε₁·q(N)): the bound when the first pulse interval is held fixed."""
    return delta_bound(BoundParams(params.n_pulses, params.eta, params.epsilon1 * q_factor(params.n_pulses)))


def distance_bound(params: BoundParams) -> float:
    """min[1, Δ + Δ²]."""
    try:
        delta = delta_bound(params)
    except BoundOverflowError:
        return 1.0
    if delta >= 1:
        return 1.0
    return min(1.0, delta + delta * delta)


def leading_order_delta(params: BoundParams) -> float:
    """p_{N+1}(η)·ε^{N+1}, the small-ε asymptote of Δ_N."""
    if params.epsilon == 0:
        return 0.0
    return _safe_exp(_log_term(params.n_pulses + 1, params.eta, math.log(params.epsilon)), "leading term")


def leading_term_growth(n_pulses: int, eta: float, epsilon1: float) -> float:
    """log[p_{N+1}(η)·q(N+1)^{N+1}·ε₁^{N+1}]."""
    if n_pulses < 1:
        raise InvalidParameterError(f"n_pulses must be >= 1, got {n_pulses}")
    _check_non_negative(eta=eta, epsilon1=epsilon1)
    if epsilon1 == 0:
        return -math.inf
    m = n_pulses + 1
    return log_p_coefficient(m, eta) + m * math.log(q_factor(m)) + m * math.log(epsilon1)


def stirling_growth(n_pulses: int, eta: float, epsilon1: float) -> float:
    """N·log(cN) with c = ½(2/π)²·e·(1+η)·ε₁."""
    if n_pulses < 1:
        raise InvalidParameterError(f"n_pulses must be >= 1, got {n_pulses}")
    _check_non_negative(eta=eta, epsilon1=epsilon1)
    c = 0.5 * (2 / math.pi) ** 2 * math.e * (1 + eta) * epsilon1
    if c == 0:
        return -math.inf
    return n_pulses * math.log(c * n_pulses)


def optimal_pulse_count(
    eta: float, epsilon1: float, candidates: Iterable[int] = config.FIGURE_N_GRID
) -> int:
    """Pulse count with the smallest fixed-interval bound; ties go to fewer pulses."""
    best_n: Optional[int] = None
    best_value = math.inf
    for n in sorted(candidates):
        try:
            value = delta_bound_fixed_interval(FixedIntervalParams(n, eta, epsilon1))
        except BoundOverflowError:
            value = math.inf
        logger.debug(f"fixed-interval bound N={n}, eta={eta}, eps1={epsilon1}: {value:.6g}")
        if best_n is None or value < best_value:
            best_n, best_value = n, value
    if best_n is None:
        raise InvalidParameterError("candidates must be non-empty")
    return best_n


def max_epsilon_for_delta(n_pulses: int, eta: float, target: float) -> float:
    """Largest ε with Δ_N(η, ε) ≤ target (inf when η = 0)."""
    if not (math.isfinite(target) and target > 0):
        raise InvalidParameterError(f"target must be positive and finite, got {target}")
    _check_non_negative(eta=eta)
    if eta == 0:
        return math.inf
    log_target = math.log(target)

    def excess(epsilon: float) -> float:
        return log_delta_bound(BoundParams(n_pulses, eta, epsilon)) - log_target

    lo = hi = 1.0
    while excess(lo) > 0:
        lo /= 10
    while excess(hi) < 0:
        hi *= 2
    if lo == hi:
        lo = hi / 2
    root = brentq(excess, lo, hi, xtol=1e-300, rtol=1e-13)
    # step inside so Δ_N(root) never exceeds target through root-finding slack
    return root * (1 - 1e-12)
