"""End-to-end checks of the bound curves and the proved inequalities."""
import math

import numpy as np
import pytest

from udd_lab import config
from udd_lab.main import _curve
from udd_lab.models.dyson import AlphaWord
from udd_lab.models.experiment import ExperimentSpec
from udd_lab.models.params import BoundParams, FixedIntervalParams
from udd_lab.services.bounds_service import (
    delta_bound,
    delta_bound_fixed_interval,
    dyson_term_bound,
    log_delta_bound,
    log_p_coefficient,
    max_epsilon_for_delta,
)
from udd_lab.services.dyson_service import dyson_term, enumerate_words, f_alpha_exact, verify_vanishing_orders
from udd_lab.services.sequence_service import build_sequence, udd_sequence
from udd_lab.services.simulator_service import (
    correlation_functions,
    order_scaling_fit,
    random_bath,
    reduced_state_from_correlations,
    scaling_time_grid,
    split_residuals,
    toggling_propagator,
    verify_bound,
)
from udd_lab.storage.artifact_store import dumps_json, frame_to_csv
from udd_lab.utils import linops
from udd_lab.utils.random_states import projector, random_density, random_pure_state

TOL = config.INEQUALITY_TOL
EPS_GRID = np.geomspace(config.EPS_MIN, config.EPS_MAX, config.EPS_POINTS)


def _log_curve(n, eta):
    return np.array([log_delta_bound(BoundParams(n, eta, float(eps))) for eps in EPS_GRID])


def test_bound_curves_are_monotone_and_ordered():
    curves = {(n, eta): _log_curve(n, eta) for n in config.FIGURE_N_GRID for eta in config.FIGURE_ETA_GRID}
    for (n, eta), curve in curves.items():
        assert np.all(np.diff(curve) > 0), (n, eta)

    for n in config.FIGURE_N_GRID:
        for low, high in zip(config.FIGURE_ETA_GRID, config.FIGURE_ETA_GRID[1:]):
            assert np.all(curves[(n, low)] < curves[(n, high)]), (n, low, high)

    # beyond ε(1+η) ≈ 10 every Δ_N rounds to S_− in double precision
    for eta in config.FIGURE_ETA_GRID:
        resolved = EPS_GRID * (1 + eta) <= 10
        for small, large in zip(config.FIGURE_N_GRID, config.FIGURE_N_GRID[1:]):
            assert np.all(curves[(large, eta)][resolved] < curves[(small, eta)][resolved]), (eta, small, large)


@pytest.mark.parametrize("n", config.FIGURE_N_GRID)
@pytest.mark.parametrize("eta", config.FIGURE_ETA_GRID)
def test_small_epsilon_matches_leading_term(n, eta):
    # η = 100, odd N: p_{N+1} nearly cancels and p_{N+2}ε/p_{N+1} ≈ 0.24 at ε = 1e-3
    eps = 1e-3 if eta < 100 else 1e-5
    log_leading = log_p_coefficient(n + 1, eta) + (n + 1) * math.log(eps)
    ratio = math.exp(log_delta_bound(BoundParams(n, eta, eps)) - log_leading)
    assert ratio == pytest.approx(1.0, rel=0.01)


def test_two_pulses_tightest_at_fixed_interval():
    values = {n: delta_bound_fixed_interval(FixedIntervalParams(n, 0.01, 0.1)) for n in (2, 5, 10, 20)}
    assert all(values[2] < values[n] for n in (5, 10, 20))


def test_distance_bound_holds_over_random_trials():
    total = 0
    for dim in (2, 4, 8):
        for n in range(1, 7):
            for eta in (0.01, 1.0, 100.0):
                eps = max_epsilon_for_delta(n, eta, 0.3)
                delta = delta_bound(BoundParams(n, eta, eps))
                assert delta + delta * delta < 1
                report = verify_bound(
                    ExperimentSpec(bath_dim=dim, n_pulses=n, eta=eta, epsilon=eps, seed=100 * dim + n, trials=10)
                )
                assert report.passed, report.failed_seeds
                for trial in report.trials:
                    assert trial.distance <= delta + delta * delta + TOL
                    assert trial.b_norm_minus <= delta + TOL
                total += len(report.trials)
    assert total >= 500


def test_odd_words_vanish_up_to_six_pulses():
    for n in range(1, 7):
        report = verify_vanishing_orders(n, n)
        assert report.passed and report.max_abs_f < 1e-10
    control = verify_vanishing_orders(3, 3, timing="periodic")
    assert control.max_abs_f > 1e-4


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_order_scaling_slopes(n):
    bath = random_bath(4, 1.0, 1.0, seed=40 + n)
    fit = order_scaling_fit(bath, n, scaling_time_grid(bath.j0, 1e-3, 1e-2, 8))
    assert not fit.degenerate
    assert fit.slope == pytest.approx(n + 1, abs=config.SCALING_SLOPE_TOL)


def test_algebraic_identities_on_random_instances():
    rng = np.random.default_rng(606)
    for _ in range(1000):
        dim = int(rng.integers(2, 5))
        bath = random_bath(dim, float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.0, 2.0)), rng)
        seq = build_sequence("udd", int(rng.integers(0, 6)), float(rng.uniform(0.1, 2.0)))
        split = toggling_propagator(bath, seq)
        residuals = split_residuals(split)
        assert residuals["unitarity"] < TOL and residuals["cross"] < TOL
        assert residuals["plus_norm_excess"] < TOL

        rho_b = random_density(dim, rng)
        corr = correlation_functions(split, rho_b)
        minus = linops.sup_norm(split.b_minus)
        assert abs(corr.b_pp + corr.b_mm - 1) < TOL
        assert abs(corr.b_pm + corr.b_mp) < TOL
        assert abs(corr.b_mm) <= minus ** 2 + TOL
        assert abs(corr.b_pm) <= minus + TOL
        assert linops.correlation_inequality_check(split.b_plus, split.b_minus.conj().T, rho_b).holds

        psi = random_pure_state(2, rng)
        reduced = linops.as_density(reduced_state_from_correlations(psi, corr))
        d = linops.trace_distance(reduced, projector(psi))
        f = linops.fidelity(reduced, projector(psi))
        assert 1 - d <= f + TOL
        assert f <= math.sqrt(max(0.0, 1 - d * d)) + TOL


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_dyson_terms_within_bounds(dim):
    rng = np.random.default_rng(70 + dim)
    for _ in range(8):
        bath = random_bath(dim, float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.0, 2.0)), rng)
        seq = udd_sequence(int(rng.integers(1, 7)), float(rng.uniform(0.2, 1.5)))
        for order in range(1, 7):
            norm = linops.sup_norm(dyson_term(bath, seq, order))
            assert norm <= dyson_term_bound(bath.j0, bath.jz, seq.total_time, order) * (1 + 1e-12)


def test_f_alpha_within_simplex_volume():
    for n in (1, 3, 6):
        seq = udd_sequence(n, 1.0)
        for order in range(1, 7):
            for word in enumerate_words(order):
                assert abs(f_alpha_exact(word, seq)) <= 1 / math.factorial(order) + 1e-15
    assert f_alpha_exact(AlphaWord.parse("0" * 6), udd_sequence(6, 1.0)) == pytest.approx(1 / 720)


def test_outputs_are_reproducible():
    spec = ExperimentSpec(bath_dim=4, n_pulses=3, eta=1.0, epsilon=0.2, seed=9, trials=12)
    serial = dumps_json(verify_bound(spec).to_dict())
    assert serial == dumps_json(verify_bound(spec).to_dict())
    assert serial == dumps_json(verify_bound(spec, workers=4).to_dict())

    eps = [float(x) for x in np.geomspace(1e-3, 1.0, 7)]
    assert frame_to_csv(_curve(5, 10.0, eps, False)) == frame_to_csv(_curve(5, 10.0, eps, False))

    bath = random_bath(4, 1.0, 1.0, seed=3)
    grid = scaling_time_grid(1.0, 1e-3, 1e-2, 4)
    assert order_scaling_fit(bath, 2, grid).to_dict() == order_scaling_fit(bath, 2, grid).to_dict()
