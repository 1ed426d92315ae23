import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aloha_aoi.analytics import avg_aoi_closed_form
from aloha_aoi.errors import ConfigurationError, DegenerateProcessError
from aloha_aoi.model import AccessPolicy, ApproxMode, SystemConfig, mean_reset_value, reset_prob
from aloha_aoi.simulator import (
    NodeState,
    SimConfig,
    SimMode,
    bernoulli_positions,
    default_warmup,
    interference_equivalence_check,
    run_simulation,
)


def _naive_simulation(cfg, pol, slots, seed):
    """Slot-by-slot reference following the protocol description literally.

    Returns the time-average AoI of node 0 and the decoded-packet count.
    """
    rng = np.random.default_rng(seed)
    stored = np.full(cfg.n, -1)
    delivered = np.full(cfg.n, -1)
    area, decoded = 0.0, 0
    for t in range(slots):
        fresh = rng.random(cfg.n) < cfg.alpha
        stored[fresh] = t
        p = np.where(fresh, pol.pi_f, pol.pi_s)
        arrived = (rng.random(cfg.n) < p) & (rng.random(cfg.n) >= cfg.epsilon)
        # AoI of node 0 rises linearly over the slot; a delivery resets it at the slot end
        area += t - delivered[0] + 0.5
        if arrived.sum() == 1:
            i = int(np.flatnonzero(arrived)[0])
            decoded += 1
            if stored[i] > delivered[i]:
                delivered[i] = stored[i]
    return area / slots, decoded


def test_lone_node_deterministic():
    stats = run_simulation(SystemConfig(1, 1.0), AccessPolicy(1.0, 0.0), SimConfig(slots=10**5, seed=4))
    assert stats.time_avg_aoi == 1.5
    assert stats.time_avg_aoi_stderr == 0.0
    assert stats.throughput_hat == 1.0
    assert stats.mean_Y == 1.0 and stats.mean_Z == 1.0


def test_node_state_invariant():
    NodeState(stored_timestamp=5, delivered_timestamp=3)
    with pytest.raises(ConfigurationError):
        NodeState(stored_timestamp=2, delivered_timestamp=3)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        SimConfig(slots=0)
    with pytest.raises(ConfigurationError):
        SimConfig(slots=100, warmup=100)
    with pytest.raises(ConfigurationError):
        run_simulation(SystemConfig(3, 0.5), AccessPolicy(1.0, 0.1), SimConfig(slots=100, mode="tagged", tagged_count=4))


def test_default_warmup():
    cfg, pol = SystemConfig(50, 0.001), AccessPolicy(1.0, 0.0)
    zeta = reset_prob(cfg, pol, (1 - 0.001) ** 49)
    assert default_warmup(cfg, pol, 10**7) == math.ceil(10 / zeta)
    assert default_warmup(cfg, pol, 10**4) == 5000


@settings(max_examples=30, deadline=None)
@given(st.floats(0.001, 0.999), st.integers(0, 2**31))
def test_bernoulli_positions_rate(p, seed):
    horizon = 200_000
    pos = bernoulli_positions(np.random.default_rng(seed), p, horizon)
    assert np.all(np.diff(pos) > 0)
    assert pos.size == 0 or (pos[0] >= 0 and pos[-1] < horizon)
    sd = math.sqrt(horizon * p * (1 - p))
    assert abs(pos.size - horizon * p) <= 5 * sd + 1


def test_bernoulli_positions_lag_independence():
    # adjacent-slot success pairs occur at rate p^2
    p, horizon = 0.3, 10**6
    pos = bernoulli_positions(np.random.default_rng(0), p, horizon)
    pairs = np.count_nonzero(np.diff(pos) == 1)
    sd = math.sqrt(horizon * p * p)
    assert abs(pairs - horizon * p * p) < 5 * sd


def test_reproducible_and_seed_sensitive():
    cfg, pol = SystemConfig(20, 0.05, 0.1), AccessPolicy(0.8, 0.05)
    a = run_simulation(cfg, pol, SimConfig(slots=50_000, seed=9))
    b = run_simulation(cfg, pol, SimConfig(slots=50_000, seed=9))
    c = run_simulation(cfg, pol, SimConfig(slots=50_000, seed=10))
    assert a.as_dict() == b.as_dict()
    np.testing.assert_array_equal(a.y_histogram, b.y_histogram)
    assert a.time_avg_aoi != c.time_avg_aoi


def test_matches_naive_reference():
    cfg, pol = SystemConfig(3, 0.2, 0.1), AccessPolicy(0.7, 0.3)
    slots = 40_000
    exact = avg_aoi_closed_form(cfg, pol).avg_aoi
    ref_aoi, ref_dec = _naive_simulation(cfg, pol, slots, 1)
    stats = run_simulation(cfg, pol, SimConfig(slots=slots, seed=1, warmup=1000))
    # the naive run includes its transient from AoI(0) = 1; both agree with the analytic value
    assert ref_aoi == pytest.approx(exact, rel=0.05)
    assert stats.time_avg_aoi == pytest.approx(exact, abs=4 * stats.time_avg_aoi_stderr)
    assert ref_dec / slots == pytest.approx(stats.throughput_hat, rel=0.05)


def test_desk_scale_agreement():
    cfg, pol = SystemConfig(50, 0.01, 0.25), AccessPolicy(1.0, 0.02)
    rep = avg_aoi_closed_form(cfg, pol, ApproxMode.EXACT)
    stats = run_simulation(cfg, pol, SimConfig(slots=10**7, seed=3))
    assert stats.time_avg_aoi == pytest.approx(rep.avg_aoi, rel=0.02)
    assert stats.throughput_hat == pytest.approx(rep.throughput, rel=0.01)
    # several z-tests share this run; 4 SE keeps the joint false-alarm rate small
    assert stats.throughput_hat == pytest.approx(rep.throughput, abs=4 * stats.throughput_stderr)
    assert stats.mean_Z == pytest.approx(mean_reset_value(cfg, pol, rep.omega), abs=4 * stats.mean_Z_stderr)
    zeta = reset_prob(cfg, pol, rep.omega)
    assert stats.zeta_hat == pytest.approx(zeta, abs=4 * stats.zeta_stderr)
    assert stats.mean_Y2 >= stats.mean_Y**2
    assert stats.zeta_hat * stats.mean_Y == pytest.approx(1.0, rel=0.01)


def test_plain_aloha_throughput():
    n = 50
    rho = 1 / n
    stats = run_simulation(SystemConfig(n, 0.3), AccessPolicy.uniform(rho), SimConfig(slots=10**7, seed=5))
    assert stats.throughput_hat == pytest.approx(n * rho * (1 - rho) ** (n - 1), rel=0.01)
    assert stats.throughput_hat == stats.decoded_count / stats.measured_slots


def test_warmup_insensitivity():
    cfg, pol = SystemConfig(50, 0.02, 0.25), AccessPolicy(1.0, 0.01)
    base = run_simulation(cfg, pol, SimConfig(slots=2 * 10**6, seed=6, warmup=20_000))
    longer = run_simulation(cfg, pol, SimConfig(slots=2 * 10**6, seed=6, warmup=40_000))
    assert abs(base.time_avg_aoi - longer.time_avg_aoi) < base.time_avg_aoi_stderr


def test_replications_pool():
    cfg, pol = SystemConfig(10, 0.1, 0.2), AccessPolicy(1.0, 0.05)
    one = run_simulation(cfg, pol, SimConfig(slots=100_000, seed=2))
    three = run_simulation(cfg, pol, SimConfig(slots=100_000, seed=2, replications=3))
    assert three.replications == 3
    assert three.time_avg_aoi_stderr < one.time_avg_aoi_stderr
    exact = avg_aoi_closed_form(cfg, pol).avg_aoi
    assert three.time_avg_aoi == pytest.approx(exact, abs=4 * three.time_avg_aoi_stderr)


def test_tagged_mode_per_node_guard():
    cfg, pol = SystemConfig(50, 0.02, 0.25), AccessPolicy(1.0, 0.01)
    stats = run_simulation(cfg, pol, SimConfig(slots=20_000, seed=1, mode=SimMode.TAGGED, tagged_count=2))
    assert stats.tracked_nodes == 2
    stats.node_throughput(1)
    with pytest.raises(ConfigurationError):
        stats.node_throughput(7)


def test_equivalence_full_vs_tagged():
    cfg, pol = SystemConfig(50, 0.02, 0.25), AccessPolicy(1.0, 0.01)
    rep = interference_equivalence_check(cfg, pol, SimConfig(slots=10**6, seed=1, tagged_count=5))
    assert rep.passed, rep.z_scores


def test_equivalence_identical_when_all_nodes_tagged():
    cfg, pol = SystemConfig(2, 0.3, 0.1), AccessPolicy(0.9, 0.2)
    full = run_simulation(cfg, pol, SimConfig(slots=50_000, seed=8))
    tagged = run_simulation(cfg, pol, SimConfig(slots=50_000, seed=8, mode=SimMode.TAGGED, tagged_count=2))
    assert full.time_avg_aoi == tagged.time_avg_aoi
    assert full.throughput_hat == tagged.throughput_hat


def test_equivalence_degenerate():
    cfg = SystemConfig(5, 0.3)
    with pytest.raises(DegenerateProcessError):
        interference_equivalence_check(cfg, AccessPolicy(0.0, 0.0), SimConfig(slots=10_000, seed=1))
