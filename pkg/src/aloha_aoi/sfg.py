"""Markov chains, signal flow graphs and Mason's gain formula.

A finite Markov chain is turned into a flow graph whose edge ``i -> j``
carries the weight ``q_ij * x``. Splitting a state into a source copy (its
outgoing edges) and a sink copy (its incoming edges) makes the source-to-sink
transfer function equal to the probability generating function of the
recurrence time of that state.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, ImproperDistributionError, NoPathError, PoleAtOneError
from .polynomial import ONE, ZERO, Polynomial, RationalFunction, X

STOCHASTIC_TOL = 1e-12
PROPER_TOL = 1e-9

Label = Hashable


@dataclass(frozen=True)
class MarkovChain:
    """Finite discrete-time chain with a row-stochastic transition matrix."""

    states: tuple
    transitions: np.ndarray

    def __post_init__(self):
        q = np.array(self.transitions, dtype=float)
        k = len(self.states)
        if q.shape != (k, k):
            raise ConfigurationError(f"transition matrix must be {k}x{k}, got {q.shape}")
        if len(set(self.states)) != k:
            raise ConfigurationError("state labels must be unique")
        if np.any(q < -STOCHASTIC_TOL) or np.any(q > 1 + STOCHASTIC_TOL):
            raise ConfigurationError("transition probabilities must lie in [0, 1]")
        if np.any(np.abs(q.sum(axis=1) - 1.0) > STOCHASTIC_TOL):
            raise ConfigurationError("rows of the transition matrix must sum to 1")
        q.setflags(write=False)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", q)

    def index(self, state: Label) -> int:
        return self.states.index(state)

    def prob(self, src: Label, dst: Label) -> float:
        return float(self.transitions[self.index(src), self.index(dst)])


@dataclass(frozen=True)
class FlowGraph:
    """Directed graph with polynomial edge weights, at most one edge per ordered pair."""

    vertices: tuple
    edges: Mapping = field(default_factory=dict)

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise ConfigurationError("vertex labels must be unique")
        known = set(verts)
        edges = {}
        for (src, dst), weight in dict(self.edges).items():
            if src not in known or dst not in known:
                raise ConfigurationError(f"edge ({src!r}, {dst!r}) references an unknown vertex")
            if not isinstance(weight, Polynomial):
                weight = Polynomial(weight)
            if not weight.is_zero():
                edges[(src, dst)] = weight
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

    def successors(self, v: Label) -> list:
        return [dst for (src, dst) in self.edges if src == v]

    def out_degree(self, v: Label) -> int:
        return sum(1 for (src, _) in self.edges if src == v)


def source_label(state: Label) -> str:
    return f"{state}'"


def sink_label(state: Label) -> str:
    return f"{state}''"


def chain_to_flowgraph(chain: MarkovChain, recurrent_state: Label) -> FlowGraph:
    """Flow graph whose source-to-sink transfer function is the recurrence-time PGF.

    ``recurrent_state`` is replaced by a source vertex ``"<state>'"`` keeping
    its outgoing transitions and a sink vertex ``"<state>''"`` receiving its
    incoming ones. Every positive transition ``q_ij`` becomes an edge of
    weight ``q_ij * x``.
    """
    if recurrent_state not in chain.states:
        raise ConfigurationError(f"unknown state {recurrent_state!r}")
    src, snk = source_label(recurrent_state), sink_label(recurrent_state)
    others = [s for s in chain.states if s != recurrent_state]
    vertices = (src, *others, snk)

    def as_src(s):
        return src if s == recurrent_state else s

    def as_dst(s):
        return snk if s == recurrent_state else s

    edges = {}
    for i, si in enumerate(chain.states):
        for j, sj in enumerate(chain.states):
            q = chain.transitions[i, j]
            if q > 0.0:
                edges[(as_src(si), as_dst(sj))] = q * X
    return FlowGraph(vertices, edges)


def _simple_paths(succ: Sequence[Sequence[int]], src: int, sink: int) -> list[list[int]]:
    paths = []
    stack = [(src, [src], 1 << src)]
    while stack:
        v, path, seen = stack.pop()
        if v == sink:
            paths.append(path)
            continue
        for w in succ[v]:
            if not seen >> w & 1:
                stack.append((w, path + [w], seen | 1 << w))
    return paths


def _simple_cycles(succ: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    # each cycle is reported once, rooted at its smallest vertex
    cycles = []
    for root in range(n):
        stack = [(root, [root], 1 << root)]
        while stack:
            v, path, seen = stack.pop()
            for w in succ[v]:
                if w == root:
                    cycles.append(path)
                elif w > root and not seen >> w & 1:
                    stack.append((w, path + [w], seen | 1 << w))
    return cycles


def _chain_gain(weights: dict, walk: Sequence[int], closed: bool) -> Polynomial:
    gain = ONE
    hops = list(zip(walk, walk[1:]))
    if closed:
        hops.append((walk[-1], walk[0]))
    for a, b in hops:
        gain = gain * weights[(a, b)]
    return gain


def mason_transfer(graph: FlowGraph, src: Label, sink: Label, cancel: bool = True) -> RationalFunction:
    """Transfer function from ``src`` to ``sink`` by Mason's gain formula.

    Forward paths and loops are enumerated exhaustively. The graph
    determinant restricted to a vertex subset is expanded on the subset's
    lowest vertex: loops avoiding it, plus each loop through it times the
    determinant of what remains. This sums over exactly the sets of mutually
    non-touching loops, with memoisation over vertex subsets.

    Raises
    ------
    NoPathError
        If ``sink`` is unreachable from ``src``.
    ConfigurationError
        If ``sink`` has outgoing edges.
    """
    verts = graph.vertices
    if src not in verts or sink not in verts:
        raise ConfigurationError("source and sink must be vertices of the graph")
    if graph.out_degree(sink) != 0:
        raise ConfigurationError(f"sink {sink!r} must have no outgoing edges")
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    weights = {(idx[a], idx[b]): w for (a, b), w in graph.edges.items()}
    succ = [[] for _ in range(n)]
    for a, b in sorted(weights):
        succ[a].append(b)

    s, t = idx[src], idx[sink]
    paths = _simple_paths(succ, s, t)
    if not paths:
        raise NoPathError(f"{sink!r} is not reachable from {src!r}")

    loops = []
    for cyc in _simple_cycles(succ, n):
        mask = 0
        for v in cyc:
            mask |= 1 << v
        loops.append((mask, _chain_gain(weights, cyc, closed=True)))

    @lru_cache(maxsize=None)
    def delta(mask: int) -> Polynomial:
        if mask == 0:
            return ONE
        low = mask & -mask
        total = delta(mask & ~low)
        for lmask, gain in loops:
            if lmask & low and lmask & mask == lmask:
                total = total - gain * delta(mask & ~lmask)
        return total

    full = (1 << n) - 1
    num = ZERO
    for path in paths:
        pmask = 0
        for v in path:
            pmask |= 1 << v
        num = num + _chain_gain(weights, path, closed=False) * delta(full & ~pmask)
    g = RationalFunction(num, delta(full))
    return g.cancel() if cancel else g


@dataclass(frozen=True)
class InterRefreshStats:
    """First two moments of a positive integer random variable."""

    mean: float
    second_moment: float

    @property
    def ratio(self) -> float:
        """``E[Y^2] / (2 E[Y])``, the mean residual term of a renewal sawtooth."""
        return self.second_moment / (2.0 * self.mean)


def pgf_moments(g: RationalFunction, tol: float = PROPER_TOL) -> InterRefreshStats:
    """Mean and second moment of the law whose PGF is ``g``.

    Uses ``E[A] = G'(1)`` and ``E[A^2] = G''(1) + G'(1)`` with exact
    polynomial derivatives.
    """
    n, d = g.num, g.den
    d1 = float(d(1.0))
    if d1 == 0.0:
        raise PoleAtOneError("generating function has a pole at x = 1")
    n1 = float(n(1.0))
    if abs(n1 / d1 - 1.0) > tol:
        raise ImproperDistributionError(f"G(1) = {n1 / d1!r}, expected 1")
    dn, dd = n.deriv(), d.deriv()
    ddn, ddd = dn.deriv(), dd.deriv()
    n1p, d1p = float(dn(1.0)), float(dd(1.0))
    n1pp, d1pp = float(ddn(1.0)), float(ddd(1.0))
    # quotient rule: u = N'D - ND', G' = u / D^2, G'' = (u'D - 2uD') / D^3
    u = n1p * d1 - n1 * d1p
    du = n1pp * d1 - n1 * d1pp
    g1 = u / d1**2
    g2 = (du * d1 - 2.0 * u * d1p) / d1**3
    return InterRefreshStats(mean=g1, second_moment=g2 + g1)


def pgf_series(g: RationalFunction, y_max: int) -> np.ndarray:
    """Coefficients ``p(1), ..., p(y_max)`` of the power series of ``g``.

    Obtained from the linear recurrence ``sum_j den_j p(k-j) = num_k``.
    Values slightly below zero from rounding are clamped to zero.
    """
    d = g.den.coeffs
    if d[0] == 0.0:
        raise ValueError("denominator must have a nonzero constant term")
    nc = g.num.coeffs
    p = np.zeros(y_max + 1)
    for k in range(y_max + 1):
        acc = nc[k] if k < nc.size else 0.0
        for j in range(1, min(k, d.size - 1) + 1):
            acc -= d[j] * p[k - j]
        p[k] = acc / d[0]
    out = p[1:]
    if np.any(out < 0.0):
        if np.any(out < -1e-12):
            raise ValueError("generating function has negative series coefficients")
        warnings.warn("clamping slightly negative series coefficients to zero", RuntimeWarning)
        out = np.maximum(out, 0.0)
    return out


def absorption_pgf_by_solve(graph: FlowGraph, src: Label, sink: Label, x: float) -> float:
    """Evaluate the source-to-sink transfer at a numeric ``x`` by solving the flow equations.

    Each vertex value is the weighted sum of its predecessors, with the
    source fixed to one. Independent of path and loop enumeration.
    """
    verts = graph.vertices
    idx = {v: i for i, v in enumerate(verts)}
    k = len(verts)
    a = np.zeros((k, k))
    for (u, v), w in graph.edges.items():
        a[idx[v], idx[u]] = w(x)
    s = idx[src]
    # v = A v + e_s with the source's own incoming edges ignored
    a[s, :] = 0.0
    e = np.zeros(k)
    e[s] = 1.0
    sol = np.linalg.solve(np.eye(k) - a, e)
    return float(sol[idx[sink]])
