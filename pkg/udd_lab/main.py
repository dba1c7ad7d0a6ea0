"""Command-line front end: figure data, verification runs and Dyson checks.

Exit codes: 0 pass, 1 a verified property failed, 2 usage error.
"""
import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from udd_lab import config
from udd_lab.exceptions import BoundOverflowError, InvalidParameterError
from udd_lab.models.experiment import STATE_POLICIES, ExperimentSpec
from udd_lab.models.params import BoundParams, FixedIntervalParams
from udd_lab.models.run_config import RunConfig
from udd_lab.services.bounds_service import delta_bound, delta_bound_fixed_interval
from udd_lab.services.dyson_service import verify_vanishing_orders
from udd_lab.services.sequence_service import build_sequence
from udd_lab.services.simulator_service import (
    commuting_bath,
    order_scaling_fit,
    random_bath,
    scaling_time_grid,
    verify_bound,
)
from udd_lab.storage.artifact_store import (
    curve_filename,
    dumps_json,
    frame_to_csv,
    resolve_output_dir,
    write_csv,
    write_json,
)
from udd_lab.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PROPERTY_FAILED = 1
EXIT_USAGE = 2

TIMING_CHOICES = ("udd", "periodic", "cpmg")


def epsilon_grid(eps_min: float, eps_max: float, points: int) -> List[float]:
    """Log-spaced ε values, inclusive of both ends."""
    if not (0 < eps_min <= eps_max and math.isfinite(eps_max)):
        raise InvalidParameterError(f"need 0 < eps-min <= eps-max, got {eps_min}, {eps_max}")
    if points < 1:
        raise InvalidParameterError(f"eps-points must be positive, got {points}")
    if points == 1:
        return [float(eps_min)]
    return [float(x) for x in np.geomspace(eps_min, eps_max, points)]


def _emit(text: str):
    sys.stdout.write(text)
    sys.stdout.flush()


def cmd_timings(cfg: RunConfig) -> int:
    n = cfg.n_values[0]
    if n < 1:
        raise InvalidParameterError(f"--n must be at least 1, got {n}")
    seq = build_sequence(cfg.extras["timing"], n, cfg.extras["total_time"])
    _emit(dumps_json(seq.to_dict()))
    return EXIT_OK


def _curve(n: int, eta: float, eps_values: List[float], fixed_t1: bool) -> pd.DataFrame:
    values = []
    for eps in eps_values:
        try:
            if fixed_t1:
                values.append(delta_bound_fixed_interval(FixedIntervalParams(n, eta, eps)))
            else:
                values.append(delta_bound(BoundParams(n, eta, eps)))
        except BoundOverflowError:
            logger.warning(f"Delta_N overflows at N={n}, eta={eta}, eps={eps}; writing inf")
            values.append(math.inf)
    column = "epsilon1" if fixed_t1 else "epsilon"
    return pd.DataFrame({column: eps_values, "delta_N": values})


def cmd_bound(cfg: RunConfig) -> int:
    fixed_t1 = cfg.extras["fixed_t1"]
    pairs = [(n, eta) for n in cfg.n_values for eta in cfg.eta_values]
    logger.info(f"Evaluating {len(pairs)} curve(s) over {len(cfg.eps_values)} points")
    if len(pairs) == 1 and cfg.out is None:
        n, eta = pairs[0]
        _emit(frame_to_csv(_curve(n, eta, list(cfg.eps_values), fixed_t1)))
        return EXIT_OK
    directory = resolve_output_dir(cfg.out)
    for n, eta in pairs:
        path = write_csv(_curve(n, eta, list(cfg.eps_values), fixed_t1), directory / curve_filename(n, eta, fixed_t1))
        _emit(f"{path}\n")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    spec = ExperimentSpec(
        bath_dim=cfg.extras["dim"],
        n_pulses=cfg.n_values[0],
        eta=cfg.eta_values[0],
        epsilon=cfg.eps_values[0],
        seed=cfg.seed,
        trials=cfg.trials,
        initial_state=cfg.extras["state"],
    )
    report = verify_bound(spec, workers=cfg.extras["workers"])
    if cfg.out is None:
        _emit(dumps_json(report.to_dict()))
    else:
        path = write_json(report.to_dict(), resolve_output_dir(cfg.out) / f"simulate_N{spec.n_pulses}_seed{spec.seed}.json")
        _emit(f"{path}\n")
    return EXIT_OK if report.passed else EXIT_PROPERTY_FAILED


def cmd_scaling(cfg: RunConfig) -> int:
    n = cfg.n_values[0]
    eta = cfg.eta_values[0]
    make = commuting_bath if cfg.extras["commuting"] else random_bath
    bath = make(cfg.extras["dim"], 1.0, eta, cfg.seed)
    grid = scaling_time_grid(bath.j0, min(cfg.eps_values), max(cfg.eps_values), len(cfg.eps_values))
    fit = order_scaling_fit(bath, n, grid, timing=cfg.extras["timing"])

    summary = fit.to_dict()
    summary["warning"] = "degenerate fit: B_- vanishes to working precision" if fit.degenerate else None
    frame = pd.DataFrame({"T": fit.times, "norm_B_minus": fit.norms})
    if cfg.out is None:
        _emit(frame_to_csv(frame) if cfg.output_format == "csv" else dumps_json(summary))
    else:
        directory = resolve_output_dir(cfg.out)
        stem = f"scaling_{fit.timing}_N{n}"
        _emit(f"{write_json(summary, directory / f'{stem}.json')}\n")
        _emit(f"{write_csv(frame, directory / f'{stem}.csv')}\n")
    if fit.degenerate:
        return EXIT_OK
    return EXIT_OK if fit.within_tolerance else EXIT_PROPERTY_FAILED


def cmd_dyson_check(cfg: RunConfig) -> int:
    n = cfg.n_values[0]
    max_order = cfg.extras["max_order"]
    if max_order is None:
        max_order = min(n, config.DYSON_MAX_ORDER)
    report = verify_vanishing_orders(n, max_order, timing=cfg.extras["timing"])
    if cfg.out is None:
        _emit(dumps_json(report.to_dict()))
    else:
        path = write_json(report.to_dict(), resolve_output_dir(cfg.out) / f"dyson_{report.timing}_N{n}.json")
        _emit(f"{path}\n")
    return EXIT_OK if report.passed else EXIT_PROPERTY_FAILED


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "timings": cmd_timings,
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "scaling": cmd_scaling,
    "dyson-check": cmd_dyson_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--out", type=Path, default=None, help="output directory (default: $%s)" % config.OUTPUT_DIR_ENV)

    parser = argparse.ArgumentParser(prog="udd_lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("timings", parents=[common], help="pulse instants as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--total-time", type=float, default=1.0)
    p.add_argument("--timing", choices=TIMING_CHOICES, default="udd")

    p = sub.add_parser("bound", parents=[common], help="Delta_N curves as CSV")
    p.add_argument("--n", type=int, nargs="+", default=list(config.FIGURE_N_GRID))
    p.add_argument("--eta", type=float, nargs="+", default=list(config.FIGURE_ETA_GRID))
    p.add_argument("--eps-min", type=float, default=config.EPS_MIN)
    p.add_argument("--eps-max", type=float, default=config.EPS_MAX)
    p.add_argument("--eps-points", type=int, default=config.EPS_POINTS)
    p.add_argument("--fixed-t1", action="store_true", help="hold the first pulse interval fixed")

    p = sub.add_parser("simulate", parents=[common], help="verify the distance bound on random baths")
    p.add_argument("--dim", type=int, default=config.SIM_DIM)
    p.add_argument("--n", type=int, default=config.SIM_N_PULSES)
    p.add_argument("--eta", type=float, default=config.SIM_ETA)
    p.add_argument("--epsilon", type=float, default=config.SIM_EPSILON)
    p.add_argument("--seed", type=int, default=config.SIM_SEED)
    p.add_argument("--trials", type=int, default=config.SIM_TRIALS)
    p.add_argument("--state", choices=STATE_POLICIES, default="haar")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("scaling", parents=[common], help="fit the order of ||B_-(T)||")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=config.BATH_DIM_DEFAULT)
    p.add_argument("--seed", type=int, default=config.SIM_SEED)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--eps-min", type=float, default=config.SCALING_EPS_MIN)
    p.add_argument("--eps-max", type=float, default=config.SCALING_EPS_MAX)
    p.add_argument("--eps-points", type=int, default=config.SCALING_POINTS)
    p.add_argument("--timing", choices=TIMING_CHOICES, default="udd")
    p.add_argument("--commuting", action="store_true", help="use a bath with [B0, Bz] = 0")
    p.add_argument("--format", dest="output_format", choices=["json", "csv"], default="json")

    p = sub.add_parser("dyson-check", parents=[common], help="check that odd-z coefficients vanish")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--timing", choices=TIMING_CHOICES, default="udd")
    return parser


def _check_bound_grid(n_values, eta_values, eps_values, fixed_t1: bool):
    """Build every (N, η, ε) input up front so a bad value fails before any file is written."""
    make = FixedIntervalParams if fixed_t1 else BoundParams
    for n in n_values:
        for eta in eta_values:
            for eps in eps_values:
                make(n, eta, eps)


def build_run_config(args: argparse.Namespace) -> RunConfig:
    name = args.subcommand
    if name == "timings":
        return RunConfig(name, n_values=(args.n,), out=args.out, output_format="json",
                         extras={"timing": args.timing, "total_time": args.total_time})
    if name == "bound":
        eps_values = tuple(epsilon_grid(args.eps_min, args.eps_max, args.eps_points))
        _check_bound_grid(args.n, args.eta, eps_values, args.fixed_t1)
        return RunConfig(name, n_values=tuple(args.n), eta_values=tuple(args.eta), eps_values=eps_values,
                         out=args.out, extras={"fixed_t1": args.fixed_t1})
    if name == "simulate":
        return RunConfig(name, n_values=(args.n,), eta_values=(args.eta,), eps_values=(args.epsilon,),
                         seed=args.seed, trials=args.trials, out=args.out, output_format="json",
                         extras={"dim": args.dim, "state": args.state, "workers": args.workers})
    if name == "scaling":
        if args.eps_points < 2:
            raise InvalidParameterError(f"--eps-points must be at least 2, got {args.eps_points}")
        return RunConfig(name, n_values=(args.n,), eta_values=(args.eta,),
                         eps_values=tuple(epsilon_grid(args.eps_min, args.eps_max, args.eps_points)),
                         seed=args.seed, out=args.out, output_format=args.output_format,
                         extras={"dim": args.dim, "timing": args.timing, "commuting": args.commuting})
    return RunConfig(name, n_values=(args.n,), out=args.out, output_format="json",
                     extras={"max_order": args.max_order, "timing": args.timing})


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        cfg = build_run_config(args)
        return COMMANDS[cfg.subcommand](cfg)
    except InvalidParameterError as e:
        logger.error(f"{args.subcommand}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
