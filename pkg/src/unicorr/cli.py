"""Command-line entry points: `design` runs one solve and exports its files,
`verify` executes the oracle suites, `sweep` repeats a design over seeds.

Exit codes: 0 success, 1 validation error, 2 solver divergence, 3 I/O error,
4 verification-suite failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import io as out
from .admm import solve_admm
from .config import ConfigError, RunConfig, parse_config
from .core import InvalidInputError, InvalidLagError, phases_to_sequences
from .diagnostics import stationarity_residual
from .gradient import DegenerateModelError
from .metrics import ccl, correlation_level_db, isl, objective_total
from .pdmm import solve_pdmm
from .state import STOP_DIVERGED
from .verify import format_report, run_suites

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DIVERGED = 2
EXIT_IO = 3
EXIT_VERIFY = 4


def _solve(config: RunConfig):
    solver = solve_admm if config.algorithm == "admm" else solve_pdmm
    return solver(config.n_len, config.m_count, config.lag_set,
                  **config.solver_kwargs())


def design_summary(config: RunConfig, result, levels, wall_s: float) -> dict:
    lags = list(config.lag_set)
    finite = [v for v in levels if v != float("-inf")]
    average_level = float(np.mean(levels)) if finite == levels else float("-inf")
    x = phases_to_sequences(result.phi)
    last = result.trace[-1] if result.trace else None
    return {
        "config": config.as_dict(),
        "stop_reason": result.stop_reason,
        "iterations": len(result.trace),
        "final": {
            "objective": objective_total(result.phi, config.lag_set),
            "aug_lagrangian": last.aug_lagrangian if last else None,
            "combined_residual": last.combined_residual if last else None,
            "consensus_gap": result.state.consensus_gap(),
            "stationarity_residual": stationarity_residual(
                result.phi, config.lag_set
            ),
            "isl": isl(x, config.lag_set),
            "ccl": ccl(x, config.lag_set),
            "average_level_db": average_level,
            "min_level_db": float(min(levels)),
            "levels_db_by_lag": {str(n): v for n, v in zip(lags, levels)},
        },
        "theory": {
            "sufficient_decrease_checks": result.theory.sufficient_decrease_checks,
            "sufficient_decrease_violations":
                result.theory.sufficient_decrease_violations,
            "lower_bound_checks": result.theory.lower_bound_checks,
            "lower_bound_violations": result.theory.lower_bound_violations,
            "worst_decrease_slack": result.theory.worst_decrease_slack,
        },
        "wall_s": wall_s if config.record_wall_time else 0.0,
    }


def run_design(config: RunConfig) -> int:
    """Solve one instance and write all output files into config.output_dir."""
    t0 = time.perf_counter()
    result = _solve(config)
    wall_s = time.perf_counter() - t0

    x = phases_to_sequences(result.phi)
    lags = list(config.lag_set)
    levels = [correlation_level_db(x, n) for n in lags]
    summary = design_summary(config, result, levels, wall_s)

    d = config.output_dir
    out.ensure_dir(d)
    out.write_phases_csv(os.path.join(d, "phases.csv"), result.phi)
    out.write_sequences_csv(os.path.join(d, "sequences.csv"), x)
    out.write_trace_csv(os.path.join(d, "trace.csv"), result.trace)
    out.write_correlation_profile_csv(
        os.path.join(d, "correlation_profile.csv"), lags, levels
    )
    out.write_summary_json(os.path.join(d, "summary.json"), summary)
    return EXIT_DIVERGED if result.stop_reason == STOP_DIVERGED else EXIT_OK


def run_verify(sizes: str = "small", seed: int = 0, grad_impl=None) -> int:
    """Run the oracle suites and print a pass/fail table."""
    kwargs = {} if grad_impl is None else {"grad_impl": grad_impl}
    results = run_suites(sizes=sizes, seed=seed, **kwargs)
    print(format_report(results))
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"FAILED {r.name}: {r.detail}", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def parse_seed_list(text: str) -> list[int]:
    """Accept 'a..b' inclusive ranges or comma-separated integers."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ConfigError(f"seeds: empty range {text!r}")
        return list(range(lo, hi + 1))
    seeds = [int(v) for v in text.split(",") if v.strip()]
    if not seeds:
        raise ConfigError("seeds: need a nonempty list")
    return seeds


def run_sweep(config: RunConfig, seeds: list[int]) -> int:
    """Repeat run_design per seed; aggregate level statistics across seeds.

    Individual failures do not abort the sweep; their exit status is recorded
    and the worst one is returned.
    """
    if not seeds:
        raise ConfigError("seeds: need a nonempty list")
    base = config.output_dir
    rows = []
    per_seed_avg = []
    per_seed_min = []
    worst = EXIT_OK
    for seed in seeds:
        sub = dict(config.as_dict())
        sub["seed"] = seed
        sub["output_dir"] = os.path.join(base, f"seed_{seed}")
        run_cfg = RunConfig(**sub)
        try:
            code = run_design(run_cfg)
            result_summary = _read_summary(run_cfg.output_dir)
            stop = result_summary["stop_reason"]
            avg = _level_from_json(result_summary["final"]["average_level_db"])
            low = _level_from_json(result_summary["final"]["min_level_db"])
        except OSError as exc:
            print(f"seed {seed}: I/O failure: {exc}", file=sys.stderr)
            code, stop = EXIT_IO, "io-error"
            avg = low = float("nan")
        rows.append(
            {"seed": seed, "stop_reason": stop,
             "average_level_db": avg, "min_level_db": low}
        )
        if code == EXIT_OK:
            per_seed_avg.append(avg)
            per_seed_min.append(low)
        worst = max(worst, code)

    agg_avg = float(np.mean(per_seed_avg)) if per_seed_avg else float("nan")
    agg_min = float(min(per_seed_min)) if per_seed_min else float("nan")
    rows.append(
        {"seed": "aggregate", "stop_reason": "",
         "average_level_db": agg_avg, "min_level_db": agg_min}
    )
    out.ensure_dir(base)
    out.write_sweep_summary_csv(os.path.join(base, "sweep_summary.csv"), rows)
    return worst


def _read_summary(run_dir: str) -> dict:
    import json

    with open(os.path.join(run_dir, "summary.json"), encoding="utf-8") as fh:
        return json.load(fh)


def _level_from_json(value) -> float:
    # non-finite levels are stored as strings ("-inf", "nan") in summary.json
    return float(value)


def _load_config(args) -> RunConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "algorithm", None) is not None:
        overrides["algorithm"] = args.algorithm
    if getattr(args, "out", None) is not None:
        overrides["output_dir"] = args.out
    with open(args.config, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unicorr",
        description="Design sets of unimodular sequences with low "
        "auto/cross-correlation over a lag window.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="run one solve and export results")
    p_design.add_argument("--config", required=True, help="flat JSON config file")
    p_design.add_argument("--seed", type=int, default=None)
    p_design.add_argument("--algorithm", choices=["admm", "pdmm"], default=None)
    p_design.add_argument("--out", default=None, help="output directory")

    p_verify = sub.add_parser("verify", help="run the oracle suites")
    p_verify.add_argument("--sizes", choices=["small", "medium"], default="small")
    p_verify.add_argument("--seed", type=int, default=0)

    p_sweep = sub.add_parser("sweep", help="repeat a design over seeds")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--seeds", required=True,
                         help="'a..b' inclusive range or comma-separated list")
    p_sweep.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "design":
            return run_design(_load_config(args))
        if args.command == "verify":
            return run_verify(sizes=args.sizes, seed=args.seed)
        if args.command == "sweep":
            return run_sweep(_load_config(args), parse_seed_list(args.seeds))
        raise AssertionError(f"unhandled command {args.command!r}")
    except (ConfigError, InvalidInputError, InvalidLagError,
            DegenerateModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
