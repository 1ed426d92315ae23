"""Access-policy optimisation: throughput-optimal, reactive and retransmission-based."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .analytics import avg_aoi_closed_form, min_aoi_reactive, min_aoi_throughput_policy
from .errors import ConfigurationError, NotBracketedError
from .lambertw import lambert_w0
from .model import AccessPolicy, ApproxMode, SystemConfig, access_prob, throughput

GOLDEN_TOL = 1e-10
RETENTION_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Strategy(enum.Enum):
    THROUGHPUT_OPTIMAL = "throughput"
    REACTIVE = "reactive"
    RETRANSMISSION = "retransmission"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        aliases = {
            "throughput": cls.THROUGHPUT_OPTIMAL,
            "throughput-optimal": cls.THROUGHPUT_OPTIMAL,
            "aloha": cls.THROUGHPUT_OPTIMAL,
            "reactive": cls.REACTIVE,
            "retransmission": cls.RETRANSMISSION,
            "retransmission-based": cls.RETRANSMISSION,
            "retx": cls.RETRANSMISSION,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ConfigurationError(f"unknown strategy {value!r}") from None


@dataclass(frozen=True)
class OptimizationResult:
    """Optimised policy and its predicted performance.

    ``rho_star`` is the unconstrained AoI-optimal access probability with
    ``pi_f = 1`` for the configuration (independent of alpha); ``rho`` is the
    access probability actually used by ``policy``.
    """

    policy: AccessPolicy
    rho_star: float
    rho: float
    predicted_aoi: float
    predicted_throughput: float
    retention: float
    mode: ApproxMode
    strategy: Strategy


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    """Minimiser of a unimodal ``f`` on ``[lo, hi]``; endpoints are never evaluated."""
    if hi <= lo:
        return lo
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def aoi_derivative(config: SystemConfig, rho: float) -> float:
    """Derivative of the Poisson-limit average AoI in rho when ``pi_f = 1``."""
    keep = 1.0 - config.epsilon
    return (1.0 + (config.n * rho - 1.0 / keep) * math.exp(config.n * rho * keep)) / rho**2


def optimal_rho_star(config: SystemConfig) -> float:
    """Stationary point of the Poisson-limit AoI with ``pi_f = 1``.

    ``(1 + W0(-(1-eps)/e)) / (n (1-eps))``; the channel load there is
    ``1 + W0(-(1-eps)/e)``, strictly below one for ``eps > 0`` and zero for
    ``eps = 0``.
    """
    keep = 1.0 - config.epsilon
    return (1.0 + lambert_w0(-keep * math.exp(-1.0))) / (config.n * keep)


def _aoi_fresh_first(config: SystemConfig, rho: float, mode: ApproxMode) -> float:
    # pi_f = 1: avg AoI = 1/2 + n/S + 1/alpha - 1/rho, the alpha term is constant
    S = throughput(config, rho, mode)
    if S <= 0.0:
        return math.inf
    return 0.5 + config.n / S - 1.0 / rho


def exact_rho_star(config: SystemConfig) -> float:
    """Numerical counterpart of :func:`optimal_rho_star` under the binomial channel."""
    hi = min(1.0, config.saturation_threshold)
    rho = golden_section(lambda r: _aoi_fresh_first(config, r, ApproxMode.EXACT), 0.0, hi)
    # a minimiser at the lower edge means no finite stationary point (eps = 0)
    return 0.0 if rho <= 10.0 * GOLDEN_TOL else rho


def rho_star(config: SystemConfig, mode: ApproxMode = ApproxMode.ASYMPTOTIC) -> float:
    if mode is ApproxMode.ASYMPTOTIC:
        return optimal_rho_star(config)
    return exact_rho_star(config)


def throughput_retention(epsilon: float) -> float:
    """Throughput at the AoI-optimal load as a fraction of the peak ``1/e``.

    Equals ``(1 + W) exp(-W)`` with ``W = W0(-(1-eps)/e)``; depends on the
    erasure rate only. At ``eps = 0`` this is 0: the optimum degenerates to
    the zero-load limit and no retransmissions are used.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ConfigurationError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    w = lambert_w0(-(1.0 - epsilon) * math.exp(-1.0))
    return (1.0 + w) * math.exp(-w)


def retention_inverse(target: float, tol: float = RETENTION_TOL) -> float:
    """Erasure probability at which :func:`throughput_retention` equals ``target``.

    Bisection on (0, 1), where the retention increases from 0 to 1.
    """
    if not 0.0 < target < 1.0:
        raise NotBracketedError(f"retention target must lie in (0, 1), got {target!r}")
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = throughput_retention(mid)
        if abs(r - target) <= tol:
            break
        if r < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16:
            break
    return mid


def peak_throughput(config: SystemConfig, mode: ApproxMode) -> float:
    return throughput(config, min(1.0, config.saturation_threshold), mode)


def _result(config, policy, rho_opt, mode, strategy) -> OptimizationResult:
    report = avg_aoi_closed_form(config, policy, mode)
    return OptimizationResult(
        policy=policy,
        rho_star=rho_opt,
        rho=report.rho,
        predicted_aoi=report.avg_aoi,
        predicted_throughput=report.throughput,
        retention=report.throughput / peak_throughput(config, mode),
        mode=mode,
        strategy=strategy,
    )


def _stale_prob(rho: float, alpha: float) -> float:
    if alpha >= 1.0 or rho <= alpha:
        return 0.0
    return min(1.0, (rho - alpha) / (1.0 - alpha))


def optimal_policy(
    config: SystemConfig, strategy: Strategy, mode: ApproxMode = ApproxMode.ASYMPTOTIC
) -> OptimizationResult:
    """Optimal access probabilities for a strategy.

    For the retransmission-based strategy ``pi_f = 1`` below the saturation
    threshold ``1/(n(1-eps))`` and ``1/(alpha n (1-eps))`` above it, while
    ``pi_s = max(0, (rho* - alpha)/(1 - alpha))``. In ``EXACT`` mode ``rho*``
    is located numerically under the binomial channel.
    """
    strategy = Strategy.parse(strategy)
    r_star = rho_star(config, mode)
    if strategy is Strategy.THROUGHPUT_OPTIMAL:
        policy, _ = min_aoi_throughput_policy(config, mode)
    elif strategy is Strategy.REACTIVE:
        policy, _ = min_aoi_reactive(config, mode)
    else:
        a = config.alpha
        if a > config.saturation_threshold:
            pi_f = config.saturation_threshold / a
        else:
            pi_f = 1.0
        # alpha == rho* falls on the pi_s = 0 side
        pi_s = 0.0 if a >= r_star else _stale_prob(r_star, a)
        policy = AccessPolicy(pi_f, pi_s)
    return _result(config, policy, r_star, mode, strategy)


def numeric_min_aoi(config: SystemConfig, mode: ApproxMode = ApproxMode.ASYMPTOTIC) -> OptimizationResult:
    """Golden-section minimisation of the average AoI over the access probability.

    ``pi_f`` is pinned as in :func:`optimal_policy`; the search runs over the
    reachable rho from ``alpha * pi_f`` up to the load-one point, beyond
    which the AoI is increasing in rho in both channel modes.
    """
    a = config.alpha
    thr = config.saturation_threshold
    pi_f = thr / a if a > thr else 1.0
    lo = a * pi_f
    hi = max(lo, min(lo + (1.0 - a), thr))

    def f(rho):
        # avg AoI minus the rho-independent 1/2 + 1/alpha, which would
        # otherwise swamp the variation near the optimum when alpha is small
        if rho <= 0.0:
            return math.inf
        S = throughput(config, rho, mode)
        return config.n / S - pi_f / rho if S > 0.0 else math.inf

    rho = golden_section(f, lo, hi)
    lo_val = f(lo)
    if lo_val <= f(rho):
        rho = lo
    policy = AccessPolicy(pi_f, _stale_prob(rho, a))
    return _result(config, policy, rho, mode, Strategy.RETRANSMISSION)
