"""Slot-level Monte Carlo of feedback-free slotted ALOHA with erasures.

Per slot each node (1) receives a new reading with probability ``alpha``,
overwriting its buffer; (2) transmits with ``pi_f`` if the reading is new
this slot, else ``pi_s``; (3) each packet is erased with probability
``epsilon``; (4) the gateway decodes iff exactly one unerased packet
arrives; (5) a decoded packet refreshes the node's AoI iff its timestamp is
newer than the gateway's, resetting it to ``slot end - timestamp``.

Because the fresh-reading indicator is drawn anew every slot and the
transmit decision depends only on it, a node's unerased transmissions form
an i.i.d. Bernoulli sequence. Each node's events are therefore generated
over the whole horizon at once from geometric gaps, and collisions are
resolved afterwards from the per-slot count of unerased packets. Tagged
mode keeps per-node detail only for the first ``tagged_count`` nodes and
draws the number of unerased interferers per slot from a binomial law.

The AoI process is integrated exactly: between refreshes at times ``R_j``
and ``R_{j+1}`` it grows linearly from ``z_j``, contributing
``z_j y + y^2 / 2`` with ``y = R_{j+1} - R_j``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateProcessError
from .model import AccessPolicy, ApproxMode, SystemConfig, access_prob, reset_prob, success_prob

HIST_MAX = 50
DEFAULT_BATCHES = 20
MIN_WARMUP = 10_000


class SimMode(enum.Enum):
    FULL = "full"
    TAGGED = "tagged"


@dataclass(frozen=True)
class SimConfig:
    """Simulation budget and RNG settings.

    ``warmup=None`` selects ``max(10 / zeta, 10**4)`` slots, capped at half
    the horizon.
    """

    slots: int
    warmup: int | None = None
    seed: int = 0
    mode: SimMode = SimMode.FULL
    tagged_count: int = 1
    replications: int = 1
    batches: int = DEFAULT_BATCHES

    def __post_init__(self):
        if self.slots < 1:
            raise ConfigurationError("slots must be positive")
        if self.warmup is not None and not 0 <= self.warmup < self.slots:
            raise ConfigurationError("warmup must satisfy 0 <= warmup < slots")
        if self.tagged_count < 1:
            raise ConfigurationError("tagged_count must be >= 1")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if self.batches < 2:
            raise ConfigurationError("at least two batches are needed for standard errors")
        if self.slots >= 2**62:
            raise ConfigurationError("horizon too long")
        object.__setattr__(self, "mode", SimMode(self.mode))


@dataclass(frozen=True)
class NodeState:
    """Timestamps of the buffered reading and of the freshest reading known at the gateway."""

    stored_timestamp: int = -1
    delivered_timestamp: int = -1
    fresh_this_slot: bool = False

    def __post_init__(self):
        if self.delivered_timestamp > self.stored_timestamp:
            raise ConfigurationError("delivered timestamp cannot exceed the stored one")


@dataclass
class SimStats:
    """Monte Carlo estimates; ``*_stderr`` are one standard error."""

    mode: SimMode
    tracked_nodes: int
    measured_slots: int
    replications: int
    time_avg_aoi: float
    time_avg_aoi_stderr: float
    node_aoi: np.ndarray
    throughput_hat: float
    throughput_stderr: float
    decoded_count: int
    mean_Y: float
    mean_Y_stderr: float
    mean_Y2: float
    mean_Y2_stderr: float
    y_samples: int
    mean_Z: float
    mean_Z_stderr: float
    zeta_hat: float
    zeta_stderr: float
    refresh_count: int
    y_histogram: np.ndarray
    y_overflow: int
    node_decoded: np.ndarray = field(repr=False)

    def p_y(self) -> np.ndarray:
        """Empirical PMF of the inter-refresh time for ``y = 1..HIST_MAX``."""
        if self.y_samples == 0:
            return np.full(HIST_MAX, np.nan)
        return self.y_histogram / self.y_samples

    def p_y_stderr(self) -> np.ndarray:
        p = self.p_y()
        return np.sqrt(p * (1.0 - p) / max(self.y_samples, 1))

    def node_throughput(self, node: int) -> float:
        """Decoded packets per slot of one node (tracked nodes only)."""
        if not 0 <= node < self.tracked_nodes:
            if self.mode is SimMode.TAGGED:
                raise ConfigurationError(
                    f"node {node} is an untracked interferer in tagged mode; "
                    "per-node throughput is only available for tagged nodes"
                )
            raise IndexError(node)
        return self.node_decoded[node] / (self.measured_slots * self.replications)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "tracked_nodes": self.tracked_nodes,
            "measured_slots": self.measured_slots,
            "replications": self.replications,
            "time_avg_aoi": self.time_avg_aoi,
            "time_avg_aoi_stderr": self.time_avg_aoi_stderr,
            "throughput_hat": self.throughput_hat,
            "throughput_stderr": self.throughput_stderr,
            "decoded_count": self.decoded_count,
            "mean_y": self.mean_Y,
            "mean_y_stderr": self.mean_Y_stderr,
            "mean_y2": self.mean_Y2,
            "mean_y2_stderr": self.mean_Y2_stderr,
            "y_samples": self.y_samples,
            "mean_z": self.mean_Z,
            "mean_z_stderr": self.mean_Z_stderr,
            "zeta_hat": self.zeta_hat,
            "zeta_stderr": self.zeta_stderr,
            "refresh_count": self.refresh_count,
        }


def bernoulli_positions(rng: np.random.Generator, p: float, horizon: int) -> np.ndarray:
    """Sorted indices in ``[0, horizon)`` of successes of i.i.d. Bernoulli(p) trials."""
    if p <= 0.0 or horizon <= 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(horizon, dtype=np.int64)
    chunks = []
    last = -1
    while last < horizon - 1:
        need = (horizon - 1 - last) * p
        k = int(need + 6.0 * math.sqrt(need + 1.0) + 16)
        pos = last + np.cumsum(rng.geometric(p, size=k))
        chunks.append(pos)
        last = int(pos[-1])
    out = np.concatenate(chunks)
    return out[out < horizon]


def _sorted_member(values: np.ndarray, pool: np.ndarray) -> np.ndarray:
    if pool.size == 0:
        return np.zeros(values.size, dtype=bool)
    idx = np.searchsorted(pool, values)
    idx[idx == pool.size] = pool.size - 1
    return pool[idx] == values


def _node_transmissions(rng, horizon, alpha, pf_keep, ps_keep):
    """Unerased transmission slots of one node and the timestamp each carries."""
    fresh = bernoulli_positions(rng, alpha, horizon)
    fresh_tx = fresh[rng.random(fresh.size) < pf_keep]
    cand = bernoulli_positions(rng, ps_keep, horizon)
    stale_tx = cand[~_sorted_member(cand, fresh)]
    tx = np.sort(np.concatenate([fresh_tx, stale_tx]))
    if fresh.size == 0:
        return tx, np.full(tx.size, -1, dtype=np.int64)
    k = np.searchsorted(fresh, tx, side="right") - 1
    stamp = np.where(k >= 0, fresh[np.maximum(k, 0)], -1)
    return tx, stamp


@dataclass
class _Accum:
    tracked: int
    measured: int
    area: np.ndarray            # per batch, pooled over nodes
    node_area: np.ndarray       # per node, whole window
    refreshes: np.ndarray       # per batch
    decoded: np.ndarray         # per batch
    node_decoded: np.ndarray
    y_sum: float = 0.0
    y2_sum: float = 0.0
    y4_sum: float = 0.0
    y_n: int = 0
    z_sum: float = 0.0
    z2_sum: float = 0.0
    z_n: int = 0
    hist: np.ndarray = field(default_factory=lambda: np.zeros(HIST_MAX, dtype=np.int64))
    overflow: int = 0


def _integrate_node(acc: _Accum, node: int, tx, stamp, success, bounds):
    warm, end = bounds[0], bounds[-1]
    st = stamp[success]
    t = tx[success]
    prev = np.concatenate([[-1], st[:-1]])
    innov = st > prev
    refresh_at = np.concatenate([[0], t[innov] + 1]).astype(np.float64)
    z = np.concatenate([[1], t[innov] + 1 - st[innov]]).astype(np.float64)

    y = np.diff(refresh_at)
    cum = np.concatenate([[0.0], np.cumsum(z[:-1] * y + 0.5 * y * y)])
    b = bounds.astype(np.float64)
    k = np.searchsorted(refresh_at, b, side="right") - 1
    u = b - refresh_at[k]
    area_at = cum[k] + z[k] * u + 0.5 * u * u
    acc.area += np.diff(area_at)
    acc.node_area[node] += area_at[-1] - area_at[0]

    in_win = (refresh_at > warm) & (refresh_at <= end)
    in_win[0] = False
    acc.refreshes += np.histogram(refresh_at[in_win], bins=b)[0]
    zw = z[in_win]
    acc.z_sum += zw.sum()
    acc.z2_sum += (zw * zw).sum()
    acc.z_n += zw.size

    # complete intervals inside the window only
    full = (refresh_at[:-1] >= warm) & (refresh_at[1:] <= end)
    yw = y[full]
    acc.y_sum += yw.sum()
    acc.y2_sum += (yw * yw).sum()
    acc.y4_sum += (yw**4).sum()
    acc.y_n += yw.size
    yi = yw.astype(np.int64)
    acc.hist += np.bincount(yi[yi <= HIST_MAX], minlength=HIST_MAX + 1)[1:]
    acc.overflow += int(np.count_nonzero(yi > HIST_MAX))


def _node_rng(seed: int, rep: int, node: int) -> np.random.Generator:
    # node streams do not depend on the mode: with tagged_count == n the two
    # modes consume identical random numbers
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep, 0, node)))


def _interferer_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep, 1, 0)))


def _replication(config: SystemConfig, policy: AccessPolicy, sim: SimConfig, warmup: int, rep: int) -> _Accum:
    n, horizon = config.n, sim.slots
    keep = 1.0 - config.epsilon
    pf_keep, ps_keep = policy.pi_f * keep, policy.pi_s * keep
    tracked = n if sim.mode is SimMode.FULL else sim.tagged_count
    bounds = np.linspace(warmup, horizon, sim.batches + 1).round().astype(np.int64)
    bounds[0], bounds[-1] = warmup, horizon
    acc = _Accum(
        tracked=tracked,
        measured=horizon - warmup,
        area=np.zeros(sim.batches),
        node_area=np.zeros(tracked),
        refreshes=np.zeros(sim.batches),
        decoded=np.zeros(sim.batches),
        node_decoded=np.zeros(tracked, dtype=np.int64),
    )

    nodes = []
    for i in range(tracked):
        rng = _node_rng(sim.seed, rep, i)
        nodes.append(_node_transmissions(rng, horizon, config.alpha, pf_keep, ps_keep))
    all_tx = np.concatenate([tx for tx, _ in nodes]) if nodes else np.empty(0, np.int64)
    count = np.bincount(all_tx, minlength=horizon).astype(np.int32)

    if sim.mode is SimMode.TAGGED and n > tracked:
        rng = _interferer_rng(sim.seed, rep)
        p = access_prob(policy, config.alpha) * keep
        chunk = 1 << 20
        for s in range(0, horizon, chunk):
            e = min(horizon, s + chunk)
            count[s:e] += rng.binomial(n - tracked, p, size=e - s).astype(np.int32)

    decoded_slots = np.flatnonzero(count == 1)
    acc.decoded += np.histogram(decoded_slots, bins=bounds)[0]

    for i, (tx, stamp) in enumerate(nodes):
        success = count[tx] == 1
        in_win = (tx >= warmup)
        acc.node_decoded[i] = int(np.count_nonzero(success & in_win))
        _integrate_node(acc, i, tx, stamp, success, bounds)
    return acc


def default_warmup(config: SystemConfig, policy: AccessPolicy, slots: int) -> int:
    rho = access_prob(policy, config.alpha)
    omega = success_prob(config, rho, ApproxMode.EXACT)
    try:
        zeta = reset_prob(config, policy, omega)
        w = max(10.0 / zeta, MIN_WARMUP)
    except DegenerateProcessError:
        w = MIN_WARMUP
    return int(min(math.ceil(w), slots // 2))


def _mean_se(total, sq_total, count):
    if count == 0:
        return math.nan, math.nan
    m = total / count
    if count < 2:
        return m, math.nan
    var = max(sq_total / count - m * m, 0.0) * count / (count - 1)
    return m, math.sqrt(var / count)


def _batch_se(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


def run_simulation(config: SystemConfig, policy: AccessPolicy, sim: SimConfig) -> SimStats:
    """Simulate ``sim.replications`` independent runs and pool them.

    Node ``i`` of replication ``r`` draws from PCG64 seeded with
    ``SeedSequence(seed, spawn_key=(r, 0, i))``; the tagged-mode interferer
    count uses ``spawn_key=(r, 1, 0)``. Results are reproducible and
    replications are independent.
    """
    if sim.mode is SimMode.TAGGED and sim.tagged_count > config.n:
        raise ConfigurationError("tagged_count cannot exceed n")
    warmup = sim.warmup if sim.warmup is not None else default_warmup(config, policy, sim.slots)
    accs = [_replication(config, policy, sim, warmup, r) for r in range(sim.replications)]
    return merge_accumulators(accs, sim.mode)


def merge_accumulators(accs: list, mode: SimMode) -> SimStats:
    tracked, measured = accs[0].tracked, accs[0].measured
    reps = len(accs)
    area = np.concatenate([a.area for a in accs])
    refreshes = np.concatenate([a.refreshes for a in accs])
    decoded = np.concatenate([a.decoded for a in accs])
    batch_len = measured / accs[0].area.size

    node_area = sum(a.node_area for a in accs)
    total_time = measured * reps
    y_sum = sum(a.y_sum for a in accs)
    y2_sum = sum(a.y2_sum for a in accs)
    y4_sum = sum(a.y4_sum for a in accs)
    y_n = sum(a.y_n for a in accs)
    z_sum = sum(a.z_sum for a in accs)
    z2_sum = sum(a.z2_sum for a in accs)
    z_n = sum(a.z_n for a in accs)
    mean_y, mean_y_se = _mean_se(y_sum, y2_sum, y_n)
    mean_y2, mean_y2_se = _mean_se(y2_sum, y4_sum, y_n)
    mean_z, mean_z_se = _mean_se(z_sum, z2_sum, z_n)

    return SimStats(
        mode=mode,
        tracked_nodes=tracked,
        measured_slots=measured,
        replications=reps,
        time_avg_aoi=float(area.sum() / (tracked * total_time)),
        time_avg_aoi_stderr=_batch_se(area / (tracked * batch_len)),
        node_aoi=node_area / total_time,
        throughput_hat=float(decoded.sum() / total_time),
        throughput_stderr=_batch_se(decoded / batch_len),
        decoded_count=int(decoded.sum()),
        mean_Y=mean_y,
        mean_Y_stderr=mean_y_se,
        mean_Y2=mean_y2,
        mean_Y2_stderr=mean_y2_se,
        y_samples=y_n,
        mean_Z=mean_z,
        mean_Z_stderr=mean_z_se,
        zeta_hat=float(refreshes.sum() / (tracked * total_time)),
        zeta_stderr=_batch_se(refreshes / (tracked * batch_len)),
        refresh_count=int(refreshes.sum()),
        y_histogram=sum(a.hist for a in accs),
        y_overflow=sum(a.overflow for a in accs),
        node_decoded=sum(a.node_decoded for a in accs),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    full: SimStats
    tagged: SimStats
    z_scores: dict
    threshold: float

    @property
    def passed(self) -> bool:
        return all(abs(z) < self.threshold for z in self.z_scores.values())


_COMPARED = (
    ("time_avg_aoi", "time_avg_aoi_stderr"),
    ("throughput_hat", "throughput_stderr"),
    ("mean_Y", "mean_Y_stderr"),
    ("mean_Z", "mean_Z_stderr"),
    ("zeta_hat", "zeta_stderr"),
)


def interference_equivalence_check(
    config: SystemConfig, policy: AccessPolicy, sim: SimConfig, threshold: float = 4.0
) -> EquivalenceReport:
    """Run full and tagged simulations with equal budgets and compare them in z-score units.

    Raises
    ------
    DegenerateProcessError
        If either run observes no AoI refresh.
    """
    base = dict(slots=sim.slots, warmup=sim.warmup, replications=sim.replications, batches=sim.batches)
    full = run_simulation(config, policy, SimConfig(mode=SimMode.FULL, seed=sim.seed, **base))
    # independent streams for the tagged run, otherwise tagged nodes would
    # replay the full run's first nodes and the z-scores would be optimistic
    tagged = run_simulation(
        config,
        policy,
        SimConfig(
            mode=SimMode.TAGGED,
            seed=sim.seed + 1,
            tagged_count=min(sim.tagged_count, config.n),
            **base,
        ),
    )
    if full.refresh_count == 0 or tagged.refresh_count == 0:
        raise DegenerateProcessError("no AoI refresh observed; statistics are undefined")
    z = {}
    for name, se_name in _COMPARED:
        a, b = getattr(full, name), getattr(tagged, name)
        se = math.hypot(getattr(full, se_name), getattr(tagged, se_name))
        z[name] = (a - b) / se if se > 0 else (0.0 if a == b else math.inf)
    return EquivalenceReport(full=full, tagged=tagged, z_scores=z, threshold=threshold)
