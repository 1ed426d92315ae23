"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 degenerate
process, 4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import analytics, recurrence
from .errors import ConfigurationError, DegenerateProcessError
from .model import (
    AccessPolicy,
    ApproxMode,
    SystemConfig,
    channel_load,
    mean_reset_value,
    reset_prob,
)
from .policy import Strategy, optimal_policy
from .simulator import HIST_MAX, SimConfig, SimMode, run_simulation
from .sweep import PRESETS, SweepSpec, make_grid, preset, sweep_rows, write_csv
from .validation import run_validation

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_INCONSISTENT = 4

ROUTE_TOL = 1e-6


class UsageError(Exception):
    pass


def probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability outside [0, 1]: {text!r}")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v != float(text) or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def nonneg_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v != float(text) or v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def float_list(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _emit_json(obj: dict, out=None) -> None:
    out = out or sys.stdout
    json.dump({k: _clean(v) for k, v in obj.items()}, out, indent=2, allow_nan=False)
    out.write("\n")


def _add_system(p, n_default=None, alpha_required=True):
    p.add_argument("--n", type=positive_int, default=n_default, required=n_default is None,
                   help="number of nodes")
    p.add_argument("--alpha", type=probability, required=alpha_required,
                   help="per-slot probability of a new reading")
    p.add_argument("--epsilon", type=probability, default=0.0, help="erasure probability")


def _add_policy(p):
    p.add_argument("--pi-f", dest="pi_f", type=probability, help="transmit probability, fresh reading")
    p.add_argument("--pi-s", dest="pi_s", type=probability, help="transmit probability, stale reading")
    p.add_argument("--pi", type=probability, help="same probability for fresh and stale readings")


def _add_mode(p, default):
    p.add_argument("--mode", choices=[m.value for m in ApproxMode], default=default.value)


def _add_sim(p, slots_default):
    p.add_argument("--seed", type=nonneg_int, default=1)
    p.add_argument("--slots", type=nonneg_int, default=slots_default)
    p.add_argument("--warmup", type=nonneg_int, default=None)
    p.add_argument("--replications", type=positive_int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aloha-aoi",
        description="Age of Information in feedback-free slotted ALOHA with retransmissions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form analysis of one configuration")
    _add_system(p)
    _add_policy(p)
    _add_mode(p, ApproxMode.EXACT)

    p = sub.add_parser("optimize", help="optimal access probabilities for a strategy")
    _add_system(p)
    p.add_argument("--strategy", default="retransmission",
                   help="throughput | reactive | retransmission")
    _add_mode(p, ApproxMode.ASYMPTOTIC)

    p = sub.add_parser("sweep", help="CSV sweep over alpha, n*alpha, epsilon or rho")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--variable", choices=["alpha", "n_alpha", "epsilon", "rho"])
    p.add_argument("--values", type=float_list, help="explicit comma-separated grid")
    p.add_argument("--min", dest="grid_min", type=float)
    p.add_argument("--max", dest="grid_max", type=float)
    p.add_argument("--points", type=positive_int, default=101)
    p.add_argument("--scale", choices=["linear", "log"], default="log")
    p.add_argument("--n", type=positive_int, default=1000)
    p.add_argument("--alpha", type=probability, default=0.001)
    p.add_argument("--epsilon", type=probability, default=None)
    p.add_argument("--epsilons", type=float_list, default=None, help="erasure values (fig7)")
    p.add_argument("--strategy", dest="strategies", default=None,
                   help="comma-separated strategies (default: all)")
    _add_mode(p, ApproxMode.ASYMPTOTIC)
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout")

    p = sub.add_parser("simulate", help="Monte Carlo simulation of one configuration")
    _add_system(p)
    _add_policy(p)
    _add_sim(p, 10**6)
    p.add_argument("--sim-mode", choices=[m.value for m in SimMode], default="full")
    p.add_argument("--tagged", dest="tagged_count", type=positive_int, default=1)
    p.add_argument("--strategy", default=None,
                   help="use the Exact-mode optimised policy of this strategy")
    p.add_argument("--histogram", default=None, help="write the inter-refresh histogram CSV here")

    p = sub.add_parser("validate", help="analytic identities and simulation agreement")
    p.add_argument("--n", type=positive_int, default=50)
    p.add_argument("--alphas", type=float_list, default=None)
    p.add_argument("--epsilons", type=float_list, default=None)
    p.add_argument("--seed", type=nonneg_int, default=1)
    p.add_argument("--slots", type=nonneg_int, default=10**6)
    p.add_argument("--no-sim", dest="simulate", action="store_false")
    return parser


def _system(args) -> SystemConfig:
    return SystemConfig(args.n, args.alpha, args.epsilon)


def _policy(args) -> AccessPolicy:
    if args.pi is not None:
        if args.pi_f is not None or args.pi_s is not None:
            raise UsageError("--pi cannot be combined with --pi-f/--pi-s")
        return AccessPolicy.uniform(args.pi)
    if args.pi_f is None:
        raise UsageError("give --pi or --pi-f (with optional --pi-s)")
    return AccessPolicy(args.pi_f, args.pi_s if args.pi_s is not None else 0.0)


def cmd_analyze(args) -> int:
    cfg, policy = _system(args), _policy(args)
    mode = ApproxMode.parse(args.mode)
    report = analytics.avg_aoi_closed_form(cfg, policy, mode)
    stats = recurrence.inter_refresh_stats(cfg, policy, report.omega)
    via_chain = analytics.avg_aoi_decomposition(
        mean_reset_value(cfg, policy, report.omega), stats.ratio
    )
    out = {
        "n": cfg.n,
        "alpha": cfg.alpha,
        "epsilon": cfg.epsilon,
        "pi_f": policy.pi_f,
        "pi_s": policy.pi_s,
        "mode": mode.value,
        "rho": report.rho,
        "omega": report.omega,
        "throughput": report.throughput,
        "load": channel_load(cfg, report.rho),
        "zeta": reset_prob(cfg, policy, report.omega),
        "mean_z": report.mean_reset,
        "mean_y": stats.mean,
        "mean_y2": stats.second_moment,
        "inter_refresh_ratio": report.inter_refresh_ratio,
        "avg_aoi_decomposition": via_chain,
        "avg_aoi_closed_form": report.avg_aoi,
    }
    _emit_json(out)
    if abs(via_chain - report.avg_aoi) > ROUTE_TOL * max(1.0, abs(report.avg_aoi)):
        print("internal inconsistency: the two AoI routes disagree", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _system(args)
    res = optimal_policy(cfg, Strategy.parse(args.strategy), ApproxMode.parse(args.mode))
    _emit_json(
        {
            "n": cfg.n,
            "alpha": cfg.alpha,
            "epsilon": cfg.epsilon,
            "strategy": res.strategy.value,
            "mode": res.mode.value,
            "pi_f": res.policy.pi_f,
            "pi_s": res.policy.pi_s,
            "rho_star": res.rho_star,
            "rho": res.rho,
            "predicted_aoi": res.predicted_aoi,
            "predicted_throughput": res.predicted_throughput,
            "retention": res.retention,
        }
    )
    return EXIT_OK


def _sweep_spec(args) -> SweepSpec:
    strategies = None
    if args.strategies:
        strategies = tuple(Strategy.parse(s) for s in args.strategies.split(",") if s.strip())
    if args.preset:
        spec = preset(args.preset, n=args.n, epsilon=args.epsilon, epsilons=args.epsilons,
                      points=args.points)
        spec.mode = ApproxMode.parse(args.mode)
        if strategies:
            spec.strategies = strategies
        return spec
    if not args.variable:
        raise UsageError("give --preset or --variable")
    if args.values:
        grid = args.values
    elif args.grid_min is not None and args.grid_max is not None:
        grid = make_grid(args.grid_min, args.grid_max, args.points, args.scale)
    else:
        raise UsageError("give --values or --min/--max")
    if args.epsilons:
        eps = tuple(args.epsilons)
    else:
        eps = (args.epsilon if args.epsilon is not None else 0.25,)
    return SweepSpec(
        variable=args.variable,
        grid=grid,
        n=args.n,
        alpha=args.alpha,
        epsilons=eps,
        strategies=strategies or tuple(Strategy),
        mode=args.mode,
    )


def cmd_sweep(args) -> int:
    rows = sweep_rows(_sweep_spec(args))
    if args.output == "-":
        write_csv(rows, sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _system(args)
    if args.strategy:
        policy = optimal_policy(cfg, Strategy.parse(args.strategy), ApproxMode.EXACT).policy
    else:
        policy = _policy(args)
    if args.slots < 1:
        raise UsageError("--slots must be positive")
    analytic = analytics.avg_aoi_closed_form(cfg, policy, ApproxMode.EXACT)
    sim = SimConfig(
        slots=args.slots,
        warmup=args.warmup,
        seed=args.seed,
        mode=SimMode(args.sim_mode),
        tagged_count=args.tagged_count,
        replications=args.replications,
    )
    stats = run_simulation(cfg, policy, sim)
    out = {"n": cfg.n, "alpha": cfg.alpha, "epsilon": cfg.epsilon,
           "pi_f": policy.pi_f, "pi_s": policy.pi_s, "seed": args.seed}
    out.update(stats.as_dict())
    zeta = reset_prob(cfg, policy, analytic.omega)
    ref = {
        "avg_aoi": (stats.time_avg_aoi, stats.time_avg_aoi_stderr, analytic.avg_aoi),
        "throughput": (stats.throughput_hat, stats.throughput_stderr, analytic.throughput),
        "mean_z": (stats.mean_Z, stats.mean_Z_stderr, analytic.mean_reset),
        "zeta": (stats.zeta_hat, stats.zeta_stderr, zeta),
        "mean_y": (stats.mean_Y, stats.mean_Y_stderr, 1.0 / zeta),
    }
    for key, (value, se, target) in ref.items():
        out[f"analytic_{key}"] = target
        if se > 0:
            out[f"z_{key}"] = (value - target) / se
        else:
            # zero spread: exact agreement or an undefined score
            out[f"z_{key}"] = 0.0 if value == target else float("nan")
    _emit_json(out)
    if args.histogram:
        p = stats.p_y()
        se = stats.p_y_stderr()
        from .sfg import pgf_series

        p_ref = pgf_series(recurrence.inter_refresh_pgf(cfg, policy, analytic.omega), HIST_MAX)
        with open(args.histogram, "w", encoding="utf-8", newline="") as fh:
            fh.write("y,count,p_hat,stderr,p_analytic\n")
            for y in range(1, HIST_MAX + 1):
                fh.write(
                    f"{y},{int(stats.y_histogram[y - 1])},{p[y - 1]:.12g},{se[y - 1]:.12g},{p_ref[y - 1]:.12g}\n"
                )
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.slots < 1:
        raise UsageError("--slots must be positive")
    kwargs = {}
    if args.alphas:
        kwargs["alphas"] = tuple(args.alphas)
    if args.epsilons:
        kwargs["epsilons"] = tuple(args.epsilons)
    report = run_validation(n=args.n, slots=args.slots, seed=args.seed, simulate=args.simulate, **kwargs)
    for line in report.lines():
        print(line)
    failed = report.failures()
    print(f"{len(report.checks) - len(failed)}/{len(report.checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VALIDATION


COMMANDS = {
    "analyze": cmd_analyze,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateProcessError as exc:
        print(f"degenerate process: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConfigurationError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
