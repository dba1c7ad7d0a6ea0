"""Exact simulation of a dephasing qubit coupled to a bounded bath.

H = I⊗B₀ + σ_z⊗B_z with the qubit as the first tensor factor. Pulses are
instantaneous π rotations about x; the toggling frame absorbs them into
the switching function so that U(T) = I⊗B₊ + σ_z⊗B₋.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Sequence, Union

import mpmath
import numpy as np

from udd_lab import config
from udd_lab.exceptions import (
    BoundOverflowError,
    DimensionMismatchError,
    InvalidParameterError,
    InvalidStateError,
    NumericalError,
)
from udd_lab.models.bath import BathModel, CorrelationFunctions, SplitPropagator
from udd_lab.models.experiment import ExperimentSpec, ScalingFit, TrialRecord, VerificationReport
from udd_lab.models.params import BoundParams
from udd_lab.models.sequence import PulseSequence
from udd_lab.models.states import DensityOperator
from udd_lab.services.bounds_service import delta_bound, distance_bound
from udd_lab.services.sequence_service import build_sequence, relative_instants_mp, switching_segments
from udd_lab.utils import linops
from udd_lab.utils.random_states import (
    projector,
    random_density,
    random_hermitian,
    random_pure_state,
)

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator]

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
PLUS_STATE = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_dim(dim: int):
    if not config.BATH_DIM_MIN <= dim <= config.BATH_DIM_MAX:
        raise InvalidParameterError(
            f"bath dimension must lie in [{config.BATH_DIM_MIN}, {config.BATH_DIM_MAX}], got {dim}"
        )


def _check_couplings(j0: float, jz: float):
    for name, value in (("j0", j0), ("jz", jz)):
        if not (math.isfinite(value) and value >= 0):
            raise InvalidParameterError(f"{name} must be finite and non-negative, got {value}")


def make_bath(b0, bz, j0: float = None, jz: float = None) -> BathModel:
    """Validate a pair of bath operators; stated norms must match within 1e-10 relative."""
    h0 = linops.ensure_hermitian(b0)
    hz = linops.ensure_hermitian(bz)
    if h0.shape != hz.shape:
        raise DimensionMismatchError(f"B0 is {h0.shape} but Bz is {hz.shape}")
    norms = {"j0": (j0, linops.sup_norm(h0)), "jz": (jz, linops.sup_norm(hz))}
    certified = {}
    for name, (stated, actual) in norms.items():
        if stated is None:
            certified[name] = actual
        elif abs(actual - stated) > 1e-10 * max(stated, 1e-300) and not (stated == 0 and actual == 0):
            raise InvalidParameterError(f"{name}={stated} does not match the operator norm {actual}")
        else:
            certified[name] = float(stated)
    return BathModel(b0=h0, bz=hz, j0=certified["j0"], jz=certified["jz"])


def _rescaled(h: np.ndarray, norm: float) -> np.ndarray:
    if norm == 0:
        return np.zeros_like(h)
    return h * (norm / linops.sup_norm(h))


def random_bath(dim: int, j0: float, jz: float, seed: SeedLike) -> BathModel:
    """Random Hermitian B₀, B_z rescaled to sup-norms exactly j0 and jz."""
    _check_dim(dim)
    _check_couplings(j0, jz)
    rng = _as_generator(seed)
    h0 = random_hermitian(dim, rng)
    hz = random_hermitian(dim, rng)
    return make_bath(_rescaled(h0, j0), _rescaled(hz, jz), j0, jz)


def commuting_bath(dim: int, j0: float, jz: float, seed: SeedLike) -> BathModel:
    """Random real diagonal B₀ and B_z, so [B₀, B_z] = 0 exactly."""
    _check_dim(dim)
    _check_couplings(j0, jz)
    rng = _as_generator(seed)
    mats = []
    for norm in (j0, jz):
        diagonal = rng.standard_normal(dim)
        diagonal = diagonal * (norm / np.abs(diagonal).max()) if norm else np.zeros(dim)
        mats.append(np.diag(diagonal).astype(complex))
    return make_bath(mats[0], mats[1], j0, jz)


def toggling_propagator(bath: BathModel, seq: PulseSequence) -> SplitPropagator:
    """B_± = (U₊ ± U₋)/2 with U_± the time-ordered products under B₀ ± f·B_z."""
    u_plus = np.eye(bath.dim, dtype=complex)
    u_minus = np.eye(bath.dim, dtype=complex)
    try:
        for duration, sign in switching_segments(seq):
            u_plus = linops.hermitian_exp(bath.b0 + sign * bath.bz, -1j * duration) @ u_plus
            u_minus = linops.hermitian_exp(bath.b0 - sign * bath.bz, -1j * duration) @ u_minus
    except NumericalError as e:
        logger.error(f"toggling propagator failed for N={seq.n_pulses}: {e}")
        raise
    return SplitPropagator(b_plus=(u_plus + u_minus) / 2, b_minus=(u_plus - u_minus) / 2)


def full_propagator(split: SplitPropagator) -> np.ndarray:
    """I⊗B₊ + σ_z⊗B₋."""
    return np.kron(IDENTITY_2, split.b_plus) + np.kron(SIGMA_Z, split.b_minus)


def split_residuals(split: SplitPropagator) -> Dict[str, float]:
    bp, bm = split.b_plus, split.b_minus
    eye = np.eye(split.dim)
    return {
        "unitarity": linops.sup_norm(bp.conj().T @ bp + bm.conj().T @ bm - eye),
        "cross": linops.sup_norm(bp.conj().T @ bm + bm.conj().T @ bp),
        "plus_norm_excess": max(0.0, linops.sup_norm(bp) - 1.0),
    }


def hamiltonian(bath: BathModel) -> np.ndarray:
    return np.kron(IDENTITY_2, bath.b0) + np.kron(SIGMA_Z, bath.bz)


def pulse_operator(bath_dim: int) -> np.ndarray:
    """π pulse about x on the qubit: −iσ_x ⊗ I."""
    return np.kron(-1j * SIGMA_X, np.eye(bath_dim))


def schrodinger_propagator(bath: BathModel, seq: PulseSequence) -> np.ndarray:
    """Explicit pulses between free evolutions.

    Equals P^N·U_toggling with P = −iσ_x⊗I.
    """
    h = hamiltonian(bath)
    pulse = pulse_operator(bath.dim)
    u = np.eye(2 * bath.dim, dtype=complex)
    for j, (duration, _) in enumerate(switching_segments(seq)):
        if j:
            u = pulse @ u
        u = linops.hermitian_exp(h, -1j * duration) @ u
    return u


def correlation_functions(split: SplitPropagator, rho_b) -> CorrelationFunctions:
    """b_αβ = tr[B_α ρ_B B_β†]."""
    rho = linops.as_density(rho_b).matrix
    if rho.shape != split.b_plus.shape:
        raise DimensionMismatchError(f"rho_B is {rho.shape} but B_± are {split.b_plus.shape}")
    ops = {"p": split.b_plus, "m": split.b_minus}

    def b(a: str, c: str) -> complex:
        return complex(np.trace(ops[a] @ rho @ ops[c].conj().T))

    return CorrelationFunctions(b_pp=b("p", "p"), b_pm=b("p", "m"), b_mp=b("m", "p"), b_mm=b("m", "m"))


def _check_qubit_state(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex)
    if v.shape != (2,):
        raise InvalidStateError(f"qubit state must have shape (2,), got {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) >= config.DENSITY_TOL:
        raise InvalidStateError(f"qubit state is not normalized, norm {np.linalg.norm(v)!r}")
    return v


def reduced_state_from_correlations(psi, corr: CorrelationFunctions) -> np.ndarray:
    """ρ_S = Σ_αβ b_αβ σ_α|ψ⟩⟨ψ|σ_β with σ₊ = I, σ₋ = σ_z.

    The b matrix is Hermitized and scaled to unit trace first, so a
    coupling-free run returns |ψ⟩⟨ψ| exactly.
    """
    p = projector(_check_qubit_state(psi))
    sigma = (IDENTITY_2, SIGMA_Z)
    b = corr.as_matrix()
    b = (b + b.conj().T) / 2
    b = b / (b[0, 0].real + b[1, 1].real)
    return sum(b[a, c] * sigma[a] @ p @ sigma[c] for a in range(2) for c in range(2))


def reduced_qubit_state(bath: BathModel, seq: PulseSequence, psi, rho_b) -> DensityOperator:
    p = projector(_check_qubit_state(psi))
    rho = linops.as_density(rho_b).matrix
    if rho.shape[0] != bath.dim:
        raise DimensionMismatchError(f"rho_B has dimension {rho.shape[0]}, bath has {bath.dim}")
    u = full_propagator(toggling_propagator(bath, seq))
    joint = u @ np.kron(p, rho) @ u.conj().T
    return linops.as_density(linops.partial_trace_bath(joint, bath.dim))


def protected_distance(bath: BathModel, seq: PulseSequence, psi, rho_b) -> float:
    """D[ρ_S(T), |ψ⟩⟨ψ|] after the sequence."""
    reduced = reduced_qubit_state(bath, seq, psi, rho_b)
    return linops.trace_distance(reduced, projector(psi))


def four_term_distance_bound(corr: CorrelationFunctions) -> float:
    """½(|b₊₊ − 1| + |b₊₋| + |b₋₊| + |b₋₋|)."""
    return 0.5 * (abs(corr.b_pp - 1) + abs(corr.b_pm) + abs(corr.b_mp) + abs(corr.b_mm))


def correlation_distance_bound(corr: CorrelationFunctions) -> float:
    """|b₊₋| + |b₋₋|."""
    return abs(corr.b_pm) + abs(corr.b_mm)


def trial_seed(master_seed: int, index: int) -> int:
    """Per-trial seed derived from (master seed, trial index) only."""
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(sequence.generate_state(1)[0])


def _run_trial(spec: ExperimentSpec, index: int) -> TrialRecord:
    seed = trial_seed(spec.seed, index)
    rng = np.random.default_rng(seed)
    bath = random_bath(spec.bath_dim, spec.epsilon, spec.eta * spec.epsilon, rng)
    psi = random_pure_state(2, rng) if spec.initial_state == "haar" else PLUS_STATE
    rho_b = linops.as_density(random_density(spec.bath_dim, rng))

    seq = build_sequence("udd", spec.n_pulses, 1.0)
    split = toggling_propagator(bath, seq)
    corr = correlation_functions(split, rho_b)
    reduced = linops.as_density(reduced_state_from_correlations(psi, corr))
    distance = linops.trace_distance(reduced, projector(psi))
    b_norm_minus = linops.sup_norm(split.b_minus)

    params = BoundParams(spec.n_pulses, spec.eta, spec.epsilon)
    try:
        delta = delta_bound(params)
    except BoundOverflowError:
        delta = math.inf
    bound = distance_bound(params)
    margin = min(bound - distance, delta - b_norm_minus)
    return TrialRecord(
        index=index,
        seed=seed,
        distance=distance,
        delta_n=delta,
        bound=bound,
        b_norm_minus=b_norm_minus,
        b_abs=(abs(corr.b_pp), abs(corr.b_pm), abs(corr.b_mp), abs(corr.b_mm)),
        margin=margin,
    )


def _trial_holds(record: TrialRecord) -> bool:
    return (
        record.distance <= record.bound + config.INEQUALITY_TOL
        and record.b_norm_minus <= record.delta_n + config.INEQUALITY_TOL
    )


def verify_bound(spec: ExperimentSpec, workers: int = 1) -> VerificationReport:
    """Check D ≤ min[1, Δ+Δ²] and ‖B₋‖ ≤ Δ on every trial, with T = 1."""
    if workers < 1:
        raise InvalidParameterError(f"workers must be at least 1, got {workers}")
    logger.info(f"Running {spec.trials} trials: {spec.to_dict()} with {workers} worker(s)")

    def run(index: int) -> TrialRecord:
        return _run_trial(spec, index)

    if workers == 1:
        trials = [run(i) for i in range(spec.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            trials = list(executor.map(run, range(spec.trials)))

    failed = [t.seed for t in trials if not _trial_holds(t)]
    min_margin = min(t.margin for t in trials)
    if failed:
        logger.error(f"Bound violated on {len(failed)} trial(s), seeds {failed}")
    else:
        logger.info(f"All {spec.trials} trials within bound, min margin {min_margin:.3e}")
    return VerificationReport(
        spec=spec, trials=trials, min_margin=min_margin, passed=not failed, failed_seeds=failed
    )


def _to_mp_matrix(m: np.ndarray) -> mpmath.matrix:
    return mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in m])


def minus_norm_extended(bath: BathModel, seq: PulseSequence, dps: int = config.SCALING_DPS) -> float:
    """‖B₋‖ with the propagator built at `dps` digits, then rounded to double."""
    with mpmath.workdps(dps):
        b0 = _to_mp_matrix(bath.b0)
        bz = _to_mp_matrix(bath.bz)
        edges = [x * mpmath.mpf(seq.total_time) for x in relative_instants_mp(seq, dps)]
        u_plus = mpmath.eye(bath.dim)
        u_minus = mpmath.eye(bath.dim)
        for j in range(len(edges) - 1):
            duration = edges[j + 1] - edges[j]
            sign = 1 if j % 2 == 0 else -1
            u_plus = mpmath.expm(-1j * duration * (b0 + sign * bz)) * u_plus
            u_minus = mpmath.expm(-1j * duration * (b0 - sign * bz)) * u_minus
        diff = (u_plus - u_minus) / 2
        b_minus = np.array([[complex(diff[i, k]) for k in range(bath.dim)] for i in range(bath.dim)])
    return linops.sup_norm(b_minus)


def scaling_time_grid(
    j0: float,
    eps_min: float = config.SCALING_EPS_MIN,
    eps_max: float = config.SCALING_EPS_MAX,
    points: int = config.SCALING_POINTS,
) -> np.ndarray:
    """Times T with J₀T log-spaced over [eps_min, eps_max]."""
    if not (j0 > 0 and 0 < eps_min < eps_max and points >= 2):
        raise InvalidParameterError(
            f"need j0 > 0, 0 < eps_min < eps_max and points >= 2, got {j0}, {eps_min}, {eps_max}, {points}"
        )
    return np.geomspace(eps_min / j0, eps_max / j0, points)


def order_scaling_fit(
    bath: BathModel, n_pulses: int, t_grid: Sequence[float], timing: str = "udd"
) -> ScalingFit:
    """Least-squares slope of log‖B₋(T)‖ against log T; UDD predicts N+1."""
    times = [float(t) for t in t_grid]
    if len(times) < 2:
        raise InvalidParameterError("t_grid needs at least two times")
    norms = [minus_norm_extended(bath, build_sequence(timing, n_pulses, t)) for t in times]
    expected = n_pulses + 1
    if min(norms) < config.SCALING_NORM_FLOOR:
        logger.warning(f"‖B_-‖ underflows ({min(norms):.3e}) for N={n_pulses}; fit is degenerate")
        return ScalingFit(n_pulses, timing, times, norms, None, None, expected, degenerate=True)
    slope, intercept = np.polyfit(np.log(times), np.log(norms), 1)
    logger.info(f"{timing} N={n_pulses}: fitted slope {slope:.4f}, expected {expected}")
    return ScalingFit(n_pulses, timing, times, norms, float(slope), float(intercept), expected)
