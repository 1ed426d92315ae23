"""Average AoI in closed form and the two single-probability optima."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateProcessError
from .model import (
    AccessPolicy,
    ApproxMode,
    SystemConfig,
    access_prob,
    mean_reset_value,
    success_prob,
    throughput,
)
from .recurrence import inter_refresh_ratio, inter_refresh_stats


@dataclass(frozen=True)
class AoiReport:
    avg_aoi: float
    mean_reset: float
    inter_refresh_ratio: float
    throughput: float
    rho: float
    omega: float
    mode: ApproxMode


def avg_aoi_decomposition(mean_reset: float, ratio: float) -> float:
    """Average AoI as mean reset value plus the length-biased residual ``E[Y^2]/(2E[Y])``."""
    return mean_reset + ratio


def _operating_point(config: SystemConfig, policy: AccessPolicy, mode: ApproxMode):
    rho = access_prob(policy, config.alpha)
    omega = success_prob(config, rho, mode)
    if rho <= 0.0 or omega <= 0.0:
        raise DegenerateProcessError(f"no AoI refresh possible (rho={rho!r}, omega={omega!r})")
    return rho, omega, config.n * rho * omega


def avg_aoi_closed_form(
    config: SystemConfig, policy: AccessPolicy, mode: ApproxMode = ApproxMode.EXACT
) -> AoiReport:
    """Average AoI ``1/2 + n/S + 1/alpha - pi_f/rho`` with its components.

    Raises
    ------
    DegenerateProcessError
        When the throughput is zero.
    """
    rho, omega, S = _operating_point(config, policy, mode)
    aoi = 0.5 + config.n / S + 1.0 / config.alpha - policy.pi_f / rho
    return AoiReport(
        avg_aoi=aoi,
        mean_reset=mean_reset_value(config, policy, omega),
        inter_refresh_ratio=inter_refresh_ratio(config, policy, omega, S),
        throughput=S,
        rho=rho,
        omega=omega,
        mode=mode,
    )


def avg_aoi_from_chain(
    config: SystemConfig, policy: AccessPolicy, mode: ApproxMode = ApproxMode.EXACT
) -> float:
    """Average AoI assembled from E[Z] and the Mason-derived moments of Y.

    Shares no algebra with :func:`avg_aoi_closed_form` beyond the channel
    quantities rho and omega.
    """
    rho, omega, _ = _operating_point(config, policy, mode)
    stats = inter_refresh_stats(config, policy, omega)
    return avg_aoi_decomposition(mean_reset_value(config, policy, omega), stats.ratio)


def min_aoi_throughput_policy(config: SystemConfig, mode: ApproxMode = ApproxMode.ASYMPTOTIC):
    """Plain ALOHA at the throughput-maximising probability ``min(1, 1/(n(1-eps)))``.

    Returns ``(policy, aoi)``; in the Poisson limit ``aoi = n e + 1/alpha - 1/2``.
    """
    pi = min(1.0, config.saturation_threshold)
    policy = AccessPolicy.uniform(pi)
    return policy, avg_aoi_closed_form(config, policy, mode).avg_aoi


def min_aoi_reactive(config: SystemConfig, mode: ApproxMode = ApproxMode.ASYMPTOTIC):
    """Fresh-only transmissions with ``pi_f = min(1, 1/(alpha n (1-eps)))``.

    Returns ``(policy, aoi)``. At ``alpha == 1/(n(1-eps))`` both branches of
    the Poisson-limit minimum coincide.
    """
    pi_f = min(1.0, config.saturation_threshold / config.alpha)
    policy = AccessPolicy(pi_f, 0.0)
    return policy, avg_aoi_closed_form(config, policy, mode).avg_aoi


def reactive_min_aoi_asymptotic(config: SystemConfig) -> float:
    """Poisson-limit reactive minimum as a two-branch formula."""
    keep = 1.0 - config.epsilon
    if config.alpha >= config.saturation_threshold:
        return 0.5 + config.n * math.e
    return 0.5 + math.exp(config.n * config.alpha * keep) / (config.alpha * keep)
