"""Inter-refresh time of a single transmitter.

The node is tracked by a three-state chain:

* ``R``: the AoI was refreshed in the last slot;
* ``S``: the node's buffered reading is already known at the gateway;
* ``F``: the node holds a reading fresher than the gateway's.

The inter-refresh time ``Y`` is the recurrence time of ``R``.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateProcessError
from .model import AccessPolicy, SystemConfig, access_prob
from .polynomial import Polynomial, RationalFunction
from .sfg import (
    InterRefreshStats,
    MarkovChain,
    chain_to_flowgraph,
    mason_transfer,
    pgf_moments,
    sink_label,
    source_label,
)

STATES = ("R", "S", "F")


def build_transmitter_chain(config: SystemConfig, policy: AccessPolicy, omega: float) -> MarkovChain:
    """Per-slot transition matrix over ``(R, S, F)``.

    From ``R`` and ``S`` the node behaves identically: a new reading arrives
    with probability ``alpha`` and is delivered in the same slot with
    probability ``pi_f * omega``. From ``F`` a delivery happens with
    probability ``rho * omega`` whether or not the reading is replaced.
    """
    a = config.alpha
    rho = access_prob(policy, a)
    fresh_hit = a * policy.pi_f * omega
    fresh_miss = a * (1.0 - policy.pi_f * omega)
    row_rs = [fresh_hit, 1.0 - a, fresh_miss]
    row_f = [rho * omega, 0.0, 1.0 - rho * omega]
    return MarkovChain(STATES, np.array([row_rs, row_rs, row_f]))


def inter_refresh_pgf(config: SystemConfig, policy: AccessPolicy, omega: float) -> RationalFunction:
    """Generating function of ``Y`` computed from the chain via Mason's formula."""
    chain = build_transmitter_chain(config, policy, omega)
    graph = chain_to_flowgraph(chain, "R")
    return mason_transfer(graph, source_label("R"), sink_label("R"))


def inter_refresh_pgf_closed_form(config: SystemConfig, policy: AccessPolicy, omega: float) -> RationalFunction:
    """Closed-form generating function of ``Y`` (degree-two numerator and denominator)."""
    a = config.alpha
    rho = access_prob(policy, a)
    num = Polynomial([0.0, a * policy.pi_f * omega, -a * omega * (policy.pi_f - rho)])
    den = Polynomial([1.0, -(2.0 - a - rho * omega), (1.0 - a) * (1.0 - rho * omega)])
    return RationalFunction(num, den)


def inter_refresh_stats(config: SystemConfig, policy: AccessPolicy, omega: float) -> InterRefreshStats:
    if access_prob(policy, config.alpha) * omega <= 0.0:
        raise DegenerateProcessError("no AoI refresh possible")
    return pgf_moments(inter_refresh_pgf(config, policy, omega))


def inter_refresh_ratio(config: SystemConfig, policy: AccessPolicy, omega: float, S: float) -> float:
    """``E[Y^2] / (2 E[Y])`` in closed form, given the aggregate throughput ``S``."""
    if S <= 0.0:
        raise DegenerateProcessError("throughput is zero: the AoI never refreshes")
    a = config.alpha
    return config.n / S + 1.0 / a - 0.5 - 1.0 / (a + (1.0 - a) * policy.pi_s * omega)
