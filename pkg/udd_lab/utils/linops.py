"""Matrix-analysis kernel: norms, distances, fidelity, exponentials, partial trace.

Everything here works on small dense complex matrices (dimension up to ~64)
and is written against numpy.
"""
import logging
from typing import List, Sequence, Union

import numpy as np

from udd_lab import config
from udd_lab.exceptions import (
    DimensionMismatchError,
    HermiticityError,
    InvalidStateError,
    NumericalError,
)
from udd_lab.models.states import CorrelationCheck, DensityOperator

logger = logging.getLogger(__name__)

MatrixLike = Union[np.ndarray, DensityOperator]


def as_matrix(a) -> np.ndarray:
    if isinstance(a, DensityOperator):
        return a.matrix
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalError("matrix has non-finite entries")
    return m


def _is_hermitian(m: np.ndarray) -> bool:
    return m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(m).max()))


def singular_values(a) -> np.ndarray:
    """Singular values in descending order.

    Taken from the eigenvalues of A†A with negative roundoff clamped to zero;
    Hermitian input uses |eigenvalues| directly, which is the same quantity
    without squaring the condition number.
    """
    m = as_matrix(a)
    if _is_hermitian(m):
        values = np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2))
    else:
        gram = m.conj().T @ m
        values = np.sqrt(np.clip(np.linalg.eigvalsh((gram + gram.conj().T) / 2), 0.0, None))
    return np.sort(values)[::-1]


def sup_norm(a) -> float:
    """Largest singular value."""
    values = singular_values(a)
    return float(values[0]) if values.size else 0.0


def trace_norm(a) -> float:
    """Sum of the singular values."""
    return float(np.sum(singular_values(a)))


def ensure_hermitian(h, tol: float = config.HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(h)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    skew = sup_norm(m - m.conj().T)
    scale = max(1.0, sup_norm(m))
    if skew / scale >= tol:
        raise HermiticityError(f"matrix is not Hermitian: ||H - H^dag|| / max(1, ||H||) = {skew / scale:.3e}")
    return (m + m.conj().T) / 2


def as_density(rho, tol: float = config.DENSITY_TOL) -> DensityOperator:
    """Validate a density matrix and wrap it."""
    if isinstance(rho, DensityOperator):
        return rho
    try:
        m = ensure_hermitian(rho, tol)
    except HermiticityError as e:
        raise InvalidStateError(f"density operator is not Hermitian: {e}") from e
    eigenvalues = np.linalg.eigvalsh(m)
    if eigenvalues.min() < -tol:
        raise InvalidStateError(f"density operator has a negative eigenvalue {eigenvalues.min():.3e}")
    trace = np.trace(m).real
    if abs(trace - 1.0) >= tol:
        raise InvalidStateError(f"density operator has trace {trace!r}, expected 1")
    return DensityOperator(m)


def _same_dims(*matrices: np.ndarray):
    shapes = {m.shape for m in matrices}
    if len(shapes) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(shapes)}")


def trace_distance(rho1: MatrixLike, rho2: MatrixLike) -> float:
    """D[ρ₁, ρ₂] = ½‖ρ₁ − ρ₂‖₁."""
    a = as_density(rho1).matrix
    b = as_density(rho2).matrix
    _same_dims(a, b)
    return float(np.clip(0.5 * trace_norm(a - b), 0.0, 1.0))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalue roundoff below zero is clipped."""
    eigenvalues, vectors = np.linalg.eigh((m + m.conj().T) / 2)
    root = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return (vectors * root) @ vectors.conj().T


def _clip_and_renormalize(m: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = np.linalg.eigh(m)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    eigenvalues /= eigenvalues.sum()
    return (vectors * eigenvalues) @ vectors.conj().T


def fidelity(rho1: MatrixLike, rho2: MatrixLike) -> float:
    """Uhlmann fidelity F = tr √(√ρ₁ ρ₂ √ρ₁) (not squared)."""
    a = _clip_and_renormalize(as_density(rho1).matrix)
    b = _clip_and_renormalize(as_density(rho2).matrix)
    _same_dims(a, b)
    root = psd_sqrt(a)
    inner = root @ b @ root
    eigenvalues = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    if eigenvalues.min() < -config.DENSITY_TOL:
        raise NumericalError(f"fidelity square root undefined, eigenvalue {eigenvalues.min():.3e}")
    return float(np.clip(np.sum(np.sqrt(np.clip(eigenvalues, 0.0, None))), 0.0, 1.0))


def hermitian_exp(h, scale: complex) -> np.ndarray:
    """exp(scale·H) via the eigendecomposition of H."""
    m = ensure_hermitian(h)
    eigenvalues, vectors = np.linalg.eigh(m)
    result = (vectors * np.exp(scale * eigenvalues)) @ vectors.conj().T
    if np.real(scale) == 0:
        defect = sup_norm(result.conj().T @ result - np.eye(m.shape[0]))
        if defect >= config.UNITARITY_TOL:
            logger.error(f"exp(scale*H) is not unitary, ||U^dag U - I|| = {defect:.3e}")
            raise NumericalError(f"exponential is not unitary within {config.UNITARITY_TOL}")
    return result


def partial_trace_bath(rho: MatrixLike, bath_dim: int) -> np.ndarray:
    """Trace out the bath of a qubit⊗bath operator; the qubit is the first factor."""
    m = as_matrix(rho)
    if m.shape != (2 * bath_dim, 2 * bath_dim):
        raise DimensionMismatchError(f"expected a {2 * bath_dim}x{2 * bath_dim} operator, got {m.shape}")
    return np.einsum("ajbj->ab", m.reshape(2, bath_dim, 2, bath_dim))


def correlation_inequality_check(q, qprime, rho: MatrixLike, tol: float = config.INEQUALITY_TOL) -> CorrelationCheck:
    """|tr[Q ρ Q′]| ≤ ‖Q‖·‖Q′‖ for any density ρ."""
    qm, qpm = as_matrix(q), as_matrix(qprime)
    r = as_density(rho).matrix
    _same_dims(qm, qpm, r)
    lhs = float(abs(np.trace(qm @ r @ qpm)))
    rhs = sup_norm(qm) * sup_norm(qpm)
    return CorrelationCheck(lhs=lhs, rhs=rhs, margin=rhs - lhs, holds=lhs <= rhs + tol)


def eigenbasis_measurement(a) -> List[np.ndarray]:
    """Rank-one projectors onto the eigenvectors of a Hermitian matrix."""
    _, vectors = np.linalg.eigh(ensure_hermitian(a))
    return [np.outer(v, v.conj()) for v in vectors.T]


def kolmogorov_distance(rho1: MatrixLike, rho2: MatrixLike, povm: Sequence[np.ndarray]) -> float:
    """½ Σ_i |tr[ρ₁E_i] − tr[ρ₂E_i]| for the outcome distributions of a POVM."""
    a = as_density(rho1).matrix
    b = as_density(rho2).matrix
    _same_dims(a, b)
    total = np.sum(povm, axis=0)
    if not np.allclose(total, np.eye(a.shape[0]), atol=1e-9):
        raise InvalidStateError("POVM elements do not sum to the identity")
    return float(0.5 * sum(abs(np.trace((a - b) @ e).real) for e in povm))
