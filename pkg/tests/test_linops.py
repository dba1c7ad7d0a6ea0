import math

import numpy as np
import pytest
from scipy.linalg import expm

from udd_lab.exceptions import DimensionMismatchError, HermiticityError, InvalidStateError
from udd_lab.utils.linops import (
    as_density,
    correlation_inequality_check,
    eigenbasis_measurement,
    ensure_hermitian,
    fidelity,
    hermitian_exp,
    kolmogorov_distance,
    partial_trace_bath,
    sup_norm,
    trace_distance,
    trace_norm,
)
from udd_lab.utils.random_states import (
    ginibre,
    projector,
    random_density,
    random_hermitian,
    random_pure_state,
    random_unitary,
)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)


def test_norm_examples():
    for d in (1, 3, 7):
        assert sup_norm(np.eye(d)) == pytest.approx(1.0)
        assert trace_norm(np.eye(d)) == pytest.approx(d)
    assert sup_norm(np.diag([2.0, -3.0])) == pytest.approx(3.0)
    assert trace_norm(np.diag([2.0, -3.0])) == pytest.approx(5.0)


def test_rank_one_trace_norm(rng):
    u = random_pure_state(5, rng)
    v = random_pure_state(5, rng)
    assert trace_norm(np.outer(u, v.conj())) == pytest.approx(1.0, abs=1e-12)


def test_sup_norm_is_the_largest_stretch(rng):
    a = ginibre(6, rng)
    norm = sup_norm(a)
    assert norm == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)
    vectors = rng.standard_normal((10_000, 6)) + 1j * rng.standard_normal((10_000, 6))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    stretches = np.linalg.norm(vectors @ a.T, axis=1)
    assert stretches.max() <= norm + 1e-12


def test_trace_norm_matches_nuclear_norm(rng):
    for _ in range(50):
        a = ginibre(int(rng.integers(2, 9)), rng)
        assert trace_norm(a) == pytest.approx(np.linalg.norm(a, "nuc"), rel=1e-10)


def test_norm_properties_on_random_matrices(rng):
    for _ in range(200):
        d = int(rng.integers(2, 8))
        a, b = ginibre(d, rng), ginibre(d, rng)
        v, w = random_unitary(d, rng), random_unitary(d, rng)
        assert sup_norm(a @ b) <= sup_norm(a) * sup_norm(b) + 1e-12
        for norm in (sup_norm, trace_norm):
            assert norm(v @ a @ w) == pytest.approx(norm(a), rel=1e-10)
            assert norm(a.conj().T) == pytest.approx(norm(a), rel=1e-10)
        assert sup_norm(a) <= trace_norm(a) + 1e-12


def test_ensure_hermitian():
    h = np.array([[1.0, 2j], [-2j, 0.5]])
    assert np.allclose(ensure_hermitian(h), h)
    with pytest.raises(HermiticityError):
        ensure_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DimensionMismatchError):
        ensure_hermitian(np.ones((2, 3)))


def test_as_density_validation():
    with pytest.raises(InvalidStateError):
        as_density(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidStateError):
        as_density(np.diag([0.5, 0.4]))
    assert as_density(np.eye(2) / 2).dim == 2


def test_trace_distance_examples(rng):
    rho = random_density(3, rng)
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-14)
    assert trace_distance(projector(KET_0), projector(KET_1)) == pytest.approx(1.0)
    assert trace_distance(projector(KET_0), np.eye(2) / 2) == pytest.approx(0.5)
    other = random_density(3, rng)
    assert trace_distance(rho, other) == pytest.approx(trace_distance(other, rho))
    with pytest.raises(DimensionMismatchError):
        trace_distance(np.eye(2) / 2, np.eye(3) / 3)


def test_fidelity_examples(rng):
    rho = random_density(4, rng)
    assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    assert fidelity(projector(KET_0), projector(KET_1)) == pytest.approx(0.0, abs=1e-7)


def test_fidelity_sandwich(rng):
    for _ in range(1000):
        a, b = random_density(4, rng), random_density(4, rng)
        d, f = trace_distance(a, b), fidelity(a, b)
        assert 1 - d <= f + 1e-10
        assert f <= math.sqrt(1 - d * d) + 1e-10


def test_hermitian_exp_examples(rng):
    assert np.allclose(hermitian_exp(np.zeros((3, 3)), -1j), np.eye(3))
    sigma_z = np.diag([1.0, -1.0])
    assert np.allclose(hermitian_exp(sigma_z, -1j * math.pi / 2), np.diag([-1j, 1j]), atol=1e-15)

    h = random_hermitian(5, rng)
    taylor = np.zeros((5, 5), dtype=complex)
    power = np.eye(5, dtype=complex)
    for k in range(40):
        taylor += power
        power = power @ (-0.1j * h) / (k + 1)
    assert np.abs(hermitian_exp(h, -0.1j) - taylor).max() < 1e-12
    assert np.abs(hermitian_exp(h, 0.3) - expm(0.3 * h)).max() < 1e-10


def test_hermitian_exp_rejects_non_hermitian():
    with pytest.raises(HermiticityError):
        hermitian_exp(np.array([[0.0, 1.0], [0.0, 0.0]]), -1j)


def test_partial_trace_examples(rng):
    psi = random_pure_state(2, rng)
    rho_b = random_density(3, rng)
    reduced = partial_trace_bath(np.kron(projector(psi), rho_b), 3)
    assert np.allclose(reduced, projector(psi), atol=1e-12)

    bell = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    assert np.allclose(partial_trace_bath(projector(bell), 2), np.eye(2) / 2)

    for _ in range(100):
        d = int(rng.integers(2, 6))
        reduced = partial_trace_bath(random_density(2 * d, rng), d)
        assert np.trace(reduced).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(reduced).min() > -1e-12

    with pytest.raises(DimensionMismatchError):
        partial_trace_bath(np.eye(6) / 6, 2)


def test_correlation_inequality_examples(rng):
    rho = random_density(3, rng)
    check = correlation_inequality_check(np.eye(3), np.eye(3), rho)
    assert check.lhs == pytest.approx(1.0) and check.rhs == pytest.approx(1.0) and check.holds
    check = correlation_inequality_check(np.zeros((3, 3)), ginibre(3, rng), rho)
    assert check.lhs == 0.0 and check.rhs == 0.0 and check.holds
    with pytest.raises(DimensionMismatchError):
        correlation_inequality_check(np.eye(2), np.eye(3), rho)


def test_correlation_inequality_random(rng):
    for _ in range(1000):
        d = int(rng.integers(2, 9))
        check = correlation_inequality_check(ginibre(d, rng), ginibre(d, rng), random_density(d, rng))
        assert check.holds
        assert check.margin >= -1e-12


def test_trace_distance_is_kolmogorov_distance_in_eigenbasis(rng):
    for _ in range(100):
        a, b = random_density(4, rng), random_density(4, rng)
        povm = eigenbasis_measurement(a - b)
        assert kolmogorov_distance(a, b, povm) == pytest.approx(trace_distance(a, b), abs=1e-12)
        # any other basis can only do worse
        other = [projector(v) for v in random_unitary(4, rng).T]
        assert kolmogorov_distance(a, b, other) <= trace_distance(a, b) + 1e-12
