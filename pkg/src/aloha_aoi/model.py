"""System parameters and elementary channel quantities.

All functions here are pure and operate on plain floats. The channel is a
slotted ALOHA collision channel with independent on-off erasures: a
transmitted packet is lost with probability ``epsilon``, and a slot is
decoded iff exactly one unerased packet reaches the gateway.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConfigurationError, DegenerateProcessError


class ApproxMode(enum.Enum):
    """How the per-transmission success probability is evaluated.

    ``EXACT`` uses the binomial interference term ``(1 - rho(1-eps))**(n-1)``.
    ``ASYMPTOTIC`` uses the Poisson limit ``exp(-n rho (1-eps))``; the
    exponent is ``n`` (not ``n - 1``) so that ``S = n * rho * omega`` yields
    exactly ``G e^{-G}`` with ``G`` the channel load. The two conventions
    differ by a factor ``exp(rho(1-eps))``, i.e. by O(rho).
    """

    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"

    @classmethod
    def parse(cls, value: "str | ApproxMode") -> "ApproxMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(f"unknown mode {value!r}") from None


def _check_prob(name: str, value: float, *, lo_open=False, hi_open=False) -> None:
    if not isinstance(value, (int, float)) or math.isnan(value):
        raise ConfigurationError(f"{name} must be a real number, got {value!r}")
    lo_ok = value > 0.0 if lo_open else value >= 0.0
    hi_ok = value < 1.0 if hi_open else value <= 1.0
    if not (lo_ok and hi_ok):
        lo = "(" if lo_open else "["
        hi = ")" if hi_open else "]"
        raise ConfigurationError(f"{name} must lie in {lo}0, 1{hi}, got {value!r}")


@dataclass(frozen=True)
class SystemConfig:
    """Network population, fresh-reading generation rate and erasure rate."""

    n: int
    alpha: float
    epsilon: float = 0.0

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ConfigurationError(f"n must be an integer >= 1, got {self.n!r}")
        _check_prob("alpha", self.alpha, lo_open=True)
        _check_prob("epsilon", self.epsilon, hi_open=True)

    @property
    def saturation_threshold(self) -> float:
        """Generation rate ``1 / (n (1 - eps))`` above which fresh traffic alone can load the channel to 1."""
        return 1.0 / (self.n * (1.0 - self.epsilon))


@dataclass(frozen=True)
class AccessPolicy:
    """Transmit probabilities for a fresh (``pi_f``) and a stale (``pi_s``) reading."""

    pi_f: float
    pi_s: float

    def __post_init__(self):
        _check_prob("pi_f", self.pi_f)
        _check_prob("pi_s", self.pi_s)

    @classmethod
    def uniform(cls, pi: float) -> "AccessPolicy":
        """Plain slotted ALOHA: same probability regardless of freshness."""
        return cls(pi, pi)


def access_prob(policy: AccessPolicy, alpha: float) -> float:
    """Per-slot probability that a node transmits, ``alpha*pi_f + (1-alpha)*pi_s``."""
    return alpha * policy.pi_f + (1.0 - alpha) * policy.pi_s


def success_prob(config: SystemConfig, rho: float, mode: ApproxMode = ApproxMode.EXACT) -> float:
    """Probability that a transmitted packet is decoded (omega).

    Parameters
    ----------
    config : SystemConfig
    rho : float
        Per-node access probability.
    mode : ApproxMode
        Binomial interference (``EXACT``) or its Poisson limit.
    """
    keep = 1.0 - config.epsilon
    if mode is ApproxMode.EXACT:
        return keep * (1.0 - rho * keep) ** (config.n - 1)
    return keep * math.exp(-config.n * rho * keep)


def channel_load(config: SystemConfig, rho: float) -> float:
    """Expected number of unerased packets reaching the gateway per slot."""
    return config.n * rho * (1.0 - config.epsilon)


def throughput(config: SystemConfig, rho: float, mode: ApproxMode = ApproxMode.EXACT) -> float:
    """Aggregate decoded packets per slot, ``n * rho * omega``."""
    return config.n * rho * success_prob(config, rho, mode)


def _refresh_denominator(config: SystemConfig, policy: AccessPolicy, omega: float) -> float:
    # alpha + (1 - alpha) pi_s omega: probability that a pending reading stops
    # being pending in a slot (replaced by a new one or delivered).
    return config.alpha + (1.0 - config.alpha) * policy.pi_s * omega


def reset_prob(config: SystemConfig, policy: AccessPolicy, omega: float) -> float:
    """Per-slot probability that the node's AoI is refreshed (zeta).

    Raises
    ------
    DegenerateProcessError
        If ``rho * omega == 0``: no refresh ever happens.
    """
    rho = access_prob(policy, config.alpha)
    if rho * omega <= 0.0:
        raise DegenerateProcessError(
            f"no AoI refresh possible (rho={rho!r}, omega={omega!r})"
        )
    return config.alpha * omega * rho / _refresh_denominator(config, policy, omega)


def reset_value_pmf(z: int, config: SystemConfig, policy: AccessPolicy, omega: float) -> float:
    """Probability that the AoI is reset to ``z`` slots, given a refresh occurred."""
    if z < 1:
        raise ValueError(f"reset value must be >= 1, got {z}")
    zeta = reset_prob(config, policy, omega)
    a = config.alpha
    scale = a * omega / zeta
    if z == 1:
        return scale * policy.pi_f
    return (
        scale
        * policy.pi_s
        * (1.0 - a) ** (z - 1)
        * (1.0 - policy.pi_f * omega)
        * (1.0 - policy.pi_s * omega) ** (z - 2)
    )


def mean_reset_value(config: SystemConfig, policy: AccessPolicy, omega: float) -> float:
    """Mean AoI value right after a refresh, E[Z] (at least one slot).

    Sum of ``z * reset_value_pmf(z)``:
    ``1 + pi_s (1-alpha)(1-pi_f omega) / (rho (alpha + (1-alpha) pi_s omega))``.
    """
    # validates the process is not degenerate
    reset_prob(config, policy, omega)
    a = config.alpha
    rho = access_prob(policy, a)
    return 1.0 + policy.pi_s * (1.0 - a) * (1.0 - policy.pi_f * omega) / (
        rho * _refresh_denominator(config, policy, omega)
    )
