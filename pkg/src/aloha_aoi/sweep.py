"""Parameter sweeps and the figure presets, emitted as CSV rows."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .analytics import avg_aoi_closed_form
from .errors import ConfigurationError
from .model import AccessPolicy, ApproxMode, SystemConfig, channel_load
from .policy import Strategy, optimal_policy, peak_throughput

COLUMNS = (
    "variable",
    "value",
    "epsilon",
    "strategy",
    "pi_f",
    "pi_s",
    "rho",
    "load",
    "throughput",
    "aoi",
    "aoi_over_n",
    "aoi_ratio",
    "retention",
)
VARIABLES = ("alpha", "n_alpha", "epsilon", "rho")
PRESETS = ("fig4", "fig5", "fig6", "fig7")
FIG_N = 1000
FIG_EPSILON = 0.25
FIG7_EPSILONS = (0.0, 0.1, 0.25)
FRESH_FIRST = "fresh-first"


@dataclass
class SweepSpec:
    """What to vary, over which grid, and for which strategies.

    ``variable`` is one of ``alpha``, ``n_alpha`` (alpha scaled by n),
    ``epsilon`` or ``rho``; a ``rho`` sweep evaluates the fresh-first policy
    family ``pi_f = 1``, ``pi_s = (rho - alpha)/(1 - alpha)``.
    """

    variable: str
    grid: list
    n: int = FIG_N
    alpha: float = 0.001
    epsilons: tuple = (FIG_EPSILON,)
    strategies: tuple = tuple(Strategy)
    mode: ApproxMode = ApproxMode.ASYMPTOTIC

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ConfigurationError(f"variable must be one of {VARIABLES}, got {self.variable!r}")
        self.grid = [float(v) for v in self.grid]
        if not self.grid:
            raise ConfigurationError("sweep grid is empty")
        self.strategies = tuple(Strategy.parse(s) for s in self.strategies)
        self.mode = ApproxMode.parse(self.mode)
        for v in self.grid:
            if self.variable == "n_alpha":
                ok = 0.0 < v <= self.n
            elif self.variable == "epsilon":
                ok = 0.0 <= v < 1.0
            elif self.variable == "alpha":
                ok = 0.0 < v <= 1.0
            else:
                ok = 0.0 < v <= 1.0
            if not ok:
                raise ConfigurationError(f"grid value {v!r} outside the domain of {self.variable}")


def make_grid(lo: float, hi: float, points: int, scale: str = "linear") -> list:
    if points < 1:
        raise ConfigurationError("grid needs at least one point")
    if scale == "log":
        if lo <= 0 or hi <= 0:
            raise ConfigurationError("log grid needs positive bounds")
        return list(np.geomspace(lo, hi, points))
    if scale == "linear":
        return list(np.linspace(lo, hi, points))
    raise ConfigurationError(f"unknown grid scale {scale!r}")


def preset(name: str, n: int = FIG_N, epsilon: float | None = None, epsilons=None, points: int = 101) -> SweepSpec:
    """Sweep against ``n * alpha`` on a log grid from 0.01 to n."""
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}")
    grid = make_grid(1e-2, float(n), points, "log")
    grid[-1] = float(n)
    if name == "fig7":
        eps = tuple(epsilons) if epsilons else FIG7_EPSILONS
    else:
        eps = (FIG_EPSILON if epsilon is None else epsilon,)
    strategies = (Strategy.RETRANSMISSION,) if name == "fig4" else tuple(Strategy)
    return SweepSpec("n_alpha", grid, n=n, epsilons=eps, strategies=strategies)


def _config(spec: SweepSpec, value: float, eps: float) -> SystemConfig:
    if spec.variable == "alpha":
        return SystemConfig(spec.n, value, eps)
    if spec.variable == "n_alpha":
        return SystemConfig(spec.n, min(1.0, value / spec.n), eps)
    if spec.variable == "epsilon":
        return SystemConfig(spec.n, spec.alpha, value)
    return SystemConfig(spec.n, spec.alpha, eps)


def sweep_rows(spec: SweepSpec) -> list[dict]:
    """One row per grid point, erasure value and strategy, in that nesting order."""
    rows = []
    eps_values = (None,) if spec.variable == "epsilon" else spec.epsilons
    for eps in eps_values:
        for value in spec.grid:
            cfg = _config(spec, value, eps)
            if spec.variable == "rho":
                rows.append(_fresh_first_row(spec, cfg, value))
                continue
            reference = None
            block = []
            for strat in spec.strategies:
                res = optimal_policy(cfg, strat, spec.mode)
                block.append((strat, res))
                if strat is Strategy.THROUGHPUT_OPTIMAL:
                    reference = res.predicted_aoi
            if reference is None:
                reference = optimal_policy(cfg, Strategy.THROUGHPUT_OPTIMAL, spec.mode).predicted_aoi
            for strat, res in block:
                rows.append(
                    {
                        "variable": spec.variable,
                        "value": value,
                        "epsilon": cfg.epsilon,
                        "strategy": strat.value,
                        "pi_f": res.policy.pi_f,
                        "pi_s": res.policy.pi_s,
                        "rho": res.rho,
                        "load": channel_load(cfg, res.rho),
                        "throughput": res.predicted_throughput,
                        "aoi": res.predicted_aoi,
                        "aoi_over_n": res.predicted_aoi / cfg.n,
                        "aoi_ratio": res.predicted_aoi / reference,
                        "retention": res.retention,
                    }
                )
    return rows


def _fresh_first_row(spec: SweepSpec, cfg: SystemConfig, rho: float) -> dict:
    a = cfg.alpha
    if rho < a:
        raise ConfigurationError(f"rho={rho!r} is below alpha={a!r}: unreachable with pi_f = 1")
    pi_s = 0.0 if a >= 1.0 else (rho - a) / (1.0 - a)
    policy = AccessPolicy(1.0, min(1.0, pi_s))
    rep = avg_aoi_closed_form(cfg, policy, spec.mode)
    reference = optimal_policy(cfg, Strategy.THROUGHPUT_OPTIMAL, spec.mode).predicted_aoi
    return {
        "variable": "rho",
        "value": rho,
        "epsilon": cfg.epsilon,
        "strategy": FRESH_FIRST,
        "pi_f": policy.pi_f,
        "pi_s": policy.pi_s,
        "rho": rep.rho,
        "load": channel_load(cfg, rep.rho),
        "throughput": rep.throughput,
        "aoi": rep.avg_aoi,
        "aoi_over_n": rep.avg_aoi / cfg.n,
        "aoi_ratio": rep.avg_aoi / reference,
        "retention": rep.throughput / peak_throughput(cfg, spec.mode),
    }


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    return f"{float(v):.12g}"


def write_csv(rows: list[dict], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in COLUMNS])


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()

