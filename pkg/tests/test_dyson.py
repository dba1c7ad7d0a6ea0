import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from udd_lab.exceptions import InvalidParameterError, OrderCapExceededError
from udd_lab.models.dyson import AlphaWord
from udd_lab.models.piecewise import PiecewisePoly
from udd_lab.models.sequence import PulseSequence
from udd_lab.services.bounds_service import dyson_term_bound
from udd_lab.services.dyson_service import (
    dyson_partial_sum,
    dyson_term,
    enumerate_words,
    f_alpha_exact,
    f_alpha_mp,
    verify_vanishing_orders,
)
from udd_lab.services.sequence_service import periodic_sequence, switching_function, udd_sequence
from udd_lab.services.simulator_service import full_propagator, random_bath, toggling_propagator
from udd_lab.utils.linops import sup_norm


def _nested_quadrature(word: str, seq: PulseSequence) -> float:
    """Same nested integral by adaptive quadrature, innermost letter first."""
    breaks = list(seq.instants)

    def weight(letter, s):
        return 1.0 if letter == "0" else float(switching_function(seq, s))

    def inner(level, s):
        if level == 0:
            return 1.0
        points = [b for b in breaks if 0 < b < s] or None
        value, _ = quad(
            lambda u: weight(word[level - 1], u) * inner(level - 1, u), 0.0, s,
            points=points, epsabs=1e-13, epsrel=1e-12, limit=200,
        )
        return value

    return inner(len(word), 1.0)


def test_alpha_word_parsing():
    word = AlphaWord.parse("z,0,z")
    assert word.letters == ("z", "0", "z")
    assert word.order == 3 and word.z_count == 2 and str(word) == "z0z"
    with pytest.raises(InvalidParameterError):
        AlphaWord(())
    with pytest.raises(InvalidParameterError):
        AlphaWord(("x",))


def test_f_alpha_examples():
    assert f_alpha_exact(AlphaWord(("0",)), udd_sequence(4, 1.0)) == pytest.approx(1.0, abs=1e-15)
    assert f_alpha_exact(AlphaWord(("z",)), udd_sequence(1, 1.0)) == pytest.approx(0.0, abs=1e-15)
    third = PulseSequence(1.0, (1 / 3,))
    assert f_alpha_exact(AlphaWord(("z",)), third) == pytest.approx(-1 / 3, abs=1e-15)
    custom = PulseSequence(1.0, (0.1, 0.2))
    assert f_alpha_exact(AlphaWord(("z",)), custom) == pytest.approx(0.8, abs=1e-15)


def test_second_order_single_pulse():
    seq = udd_sequence(1, 1.0)
    assert f_alpha_exact(AlphaWord.parse("z0"), seq) == pytest.approx(0.25, abs=1e-15)
    assert f_alpha_exact(AlphaWord.parse("0z"), seq) == pytest.approx(-0.25, abs=1e-15)


def test_nested_integral_matches_quadrature():
    udd = udd_sequence(3, 1.0)
    for word in ("z00", "zzz"):
        assert abs(f_alpha_exact(AlphaWord.parse(word), udd)) < 1e-12
        assert abs(_nested_quadrature(word, udd)) < 1e-9
    # two z letters: by parts F = -∫G², G the running switching integral
    even = f_alpha_exact(AlphaWord.parse("z0z"), udd)
    assert even < -1e-3
    assert even == pytest.approx(_nested_quadrature("z0z", udd), abs=1e-9)
    periodic = periodic_sequence(3, 1.0)
    for word in ("z0", "0zz"):
        assert f_alpha_exact(AlphaWord.parse(word), periodic) == pytest.approx(
            _nested_quadrature(word, periodic), abs=1e-9
        )


def test_extended_precision_value():
    value = f_alpha_mp(AlphaWord.parse("zz0"), udd_sequence(2, 1.0), dps=50)
    assert isinstance(value, mpmath.mpf)


def test_coefficients_are_bounded_by_inverse_factorial():
    for seq in (udd_sequence(4, 1.0), periodic_sequence(3, 1.0), PulseSequence(1.0, (0.1, 0.7))):
        for order in range(1, 7):
            for word in enumerate_words(order):
                assert abs(f_alpha_exact(word, seq)) <= 1 / math.factorial(order) + 1e-15


def test_word_enumeration_order():
    assert [str(w) for w in enumerate_words(2)] == ["00", "0z", "z0", "zz"]
    assert len(enumerate_words(5)) == 32


def test_order_cap():
    with pytest.raises(OrderCapExceededError):
        f_alpha_exact(AlphaWord(("0",) * 9), udd_sequence(9, 1.0))
    with pytest.raises(OrderCapExceededError):
        verify_vanishing_orders(9, 9)
    with pytest.raises(InvalidParameterError):
        verify_vanishing_orders(3, 4)


def test_antiderivative_is_continuous():
    with mpmath.workdps(40):
        breaks = (mpmath.mpf(0), mpmath.mpf("0.3"), mpmath.mpf("0.8"), mpmath.mpf(1))
        poly = PiecewisePoly.constant(breaks)
        for weights in ([1, -1, 1], [1, 1, 1], [1, -1, 1]):
            poly = poly.antiderivative(weights)
            assert poly.continuity_defect() < mpmath.mpf("1e-35")
        assert poly.evaluate(mpmath.mpf(0)) == 0


def test_vanishing_orders_for_udd():
    report = verify_vanishing_orders(5, 5)
    assert report.passed
    assert report.words_checked == 31
    assert report.max_abs_f < 1e-10

    single = verify_vanishing_orders(1, 1)
    assert single.passed and single.words_checked == 1 and single.argmax_word == "z"


def test_periodic_negative_control():
    report = verify_vanishing_orders(3, 3, timing="periodic")
    assert not report.passed
    assert report.max_abs_f > 1e-4
    assert report.to_dict()["pass"] is False


def test_partial_sum_order_zero_is_identity(generic_bath):
    assert np.array_equal(dyson_partial_sum(generic_bath, udd_sequence(2, 0.1), 0), np.eye(8))


def test_partial_sum_error_scales_with_next_order(generic_bath):
    errors = []
    for total_time in (0.1, 0.01):
        seq = udd_sequence(2, total_time)
        exact = full_propagator(toggling_propagator(generic_bath, seq))
        errors.append(sup_norm(dyson_partial_sum(generic_bath, seq, 2) - exact))
    assert 10 ** 2.5 < errors[0] / errors[1] < 10 ** 3.5


def test_term_norms_respect_binomial_bound(rng):
    for _ in range(3):
        bath = random_bath(3, float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.0, 2.0)), rng)
        seq = udd_sequence(int(rng.integers(1, 5)), float(rng.uniform(0.2, 1.5)))
        for order in range(1, 7):
            norm = sup_norm(dyson_term(bath, seq, order))
            assert norm <= dyson_term_bound(bath.j0, bath.jz, seq.total_time, order) * (1 + 1e-12)
