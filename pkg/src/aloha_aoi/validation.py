"""Cross-checks between the analytic routes and the simulator."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .analytics import avg_aoi_closed_form, avg_aoi_decomposition
from .model import AccessPolicy, ApproxMode, SystemConfig, mean_reset_value, reset_prob
from .policy import Strategy, optimal_policy
from .recurrence import inter_refresh_pgf, inter_refresh_pgf_closed_form, inter_refresh_ratio
from .sfg import pgf_moments, pgf_series
from .simulator import SimConfig, interference_equivalence_check, run_simulation

DEFAULT_ALPHAS = (0.005, 0.02, 0.1)
DEFAULT_EPSILONS = (0.0, 0.25)
AOI_REL_TOL = 0.02
THROUGHPUT_REL_TOL = 0.01
HIST_Y_MAX = 20
SE_FLOOR = 4.0


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name} {c.detail}".rstrip() for c in self.checks]


def default_grid(n: int = 50, alphas=DEFAULT_ALPHAS, epsilons=DEFAULT_EPSILONS, strategies=tuple(Strategy)):
    """``(config, strategy, policy)`` points using Exact-mode optimised policies."""
    points = []
    for eps, a, strat in itertools.product(epsilons, alphas, strategies):
        cfg = SystemConfig(n, a, eps)
        points.append((cfg, strat, optimal_policy(cfg, strat, ApproxMode.EXACT).policy))
    return points


def _label(cfg: SystemConfig, strat: Strategy) -> str:
    return f"[n={cfg.n} alpha={cfg.alpha:g} eps={cfg.epsilon:g} {strat.value}]"


def analytic_checks(report: ValidationReport, cfg: SystemConfig, policy: AccessPolicy, label: str) -> None:
    """Mason vs closed-form PGF, both AoI routes, and the renewal identity."""
    exact = avg_aoi_closed_form(cfg, policy, ApproxMode.EXACT)
    omega = exact.omega

    g = inter_refresh_pgf(cfg, policy, omega)
    ref = inter_refresh_pgf_closed_form(cfg, policy, omega).cancel()
    dist = max(_coef_dist(g.num.coeffs, ref.num.coeffs), _coef_dist(g.den.coeffs, ref.den.coeffs))
    report.add(f"mason_vs_closed_pgf {label}", dist < 1e-10, f"max coefficient gap {dist:.3g}")

    moments = pgf_moments(g)
    ratio = inter_refresh_ratio(cfg, policy, omega, exact.throughput)
    gap = abs(moments.ratio - ratio) / max(1.0, abs(ratio))
    report.add(f"moment_ratio_identity {label}", gap < 1e-9, f"rel gap {gap:.3g}")

    route10 = avg_aoi_decomposition(mean_reset_value(cfg, policy, omega), moments.ratio)
    gap = abs(route10 - exact.avg_aoi) / max(1.0, exact.avg_aoi)
    report.add(f"aoi_routes_agree {label}", gap < 1e-9, f"rel gap {gap:.3g}")

    renewal = reset_prob(cfg, policy, omega) * moments.mean
    report.add(f"renewal_identity {label}", abs(renewal - 1.0) < 1e-9, f"zeta*E[Y]={renewal:.12g}")


def _coef_dist(a, b) -> float:
    n = max(a.size, b.size)
    return float(np.max(np.abs(np.pad(a, (0, n - a.size)) - np.pad(b, (0, n - b.size)))))


def _within(sim: float, ref: float, se: float, rel_tol: float) -> bool:
    return abs(sim - ref) <= max(rel_tol * abs(ref), SE_FLOOR * se)


def simulation_checks(report, cfg, policy, label, sim_cfg: SimConfig, hist_se: float = SE_FLOOR):
    exact = avg_aoi_closed_form(cfg, policy, ApproxMode.EXACT)
    stats = run_simulation(cfg, policy, sim_cfg)
    err = stats.time_avg_aoi / exact.avg_aoi - 1.0
    report.add(
        f"sim_aoi {label}",
        _within(stats.time_avg_aoi, exact.avg_aoi, stats.time_avg_aoi_stderr, AOI_REL_TOL),
        f"sim={stats.time_avg_aoi:.6g} analytic={exact.avg_aoi:.6g} rel={err:+.3%}",
    )
    err = stats.throughput_hat / exact.throughput - 1.0
    report.add(
        f"sim_throughput {label}",
        _within(stats.throughput_hat, exact.throughput, stats.throughput_stderr, THROUGHPUT_REL_TOL),
        f"sim={stats.throughput_hat:.6g} analytic={exact.throughput:.6g} rel={err:+.3%}",
    )
    ok, worst = histogram_agreement(stats, cfg, policy, exact.omega, n_se=hist_se)
    report.add(f"sim_y_histogram {label}", ok, f"max |z| over y<={HIST_Y_MAX}: {worst:.2f}")
    return stats


def histogram_agreement(stats, cfg, policy, omega, y_max: int = HIST_Y_MAX, n_se: float = 3.0):
    """Whether every empirical ``p_Y(y)``, ``y <= y_max``, is within ``n_se`` standard errors."""
    p = pgf_series(inter_refresh_pgf(cfg, policy, omega), y_max)
    p_hat = stats.p_y()[:y_max]
    se = stats.p_y_stderr()[:y_max]
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (p_hat - p) / se, np.where(p_hat == p, 0.0, np.inf))
    worst = float(np.max(np.abs(z)))
    return bool(worst <= n_se), worst


def run_validation(
    n: int = 50,
    slots: int = 10**6,
    seed: int = 1,
    alphas=DEFAULT_ALPHAS,
    epsilons=DEFAULT_EPSILONS,
    simulate: bool = True,
) -> ValidationReport:
    report = ValidationReport()
    grid = default_grid(n, alphas, epsilons)
    for cfg, strat, policy in grid:
        label = _label(cfg, strat)
        analytic_checks(report, cfg, policy, label)
        if simulate:
            simulation_checks(report, cfg, policy, label, SimConfig(slots=slots, seed=seed))
    if simulate and grid:
        cfg, strat, policy = grid[-1]
        eq = interference_equivalence_check(
            cfg, policy, SimConfig(slots=slots, seed=seed, tagged_count=min(5, cfg.n))
        )
        worst = max(abs(z) for z in eq.z_scores.values())
        report.add(f"full_vs_tagged {_label(cfg, strat)}", eq.passed, f"max |z| {worst:.2f}")
    return report
