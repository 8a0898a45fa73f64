"""Informed dual-world best-first search and reference-path generation."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

from .geometry import dist
from .mil import MILProvider, MILRange, obstacle_distance
from .paths import Infeasible, OperationSequence, RWPath
from .worlds import PhysicalGrid, VirtualGraph


class ReferenceNotFound(Exception):
    """Neither multiplier run (nor escalation) produced a budget-feasible path."""


@dataclass
class HeuristicTables:
    """Per-node lower-bound tables for one (source, target) query.

    mrl / mrc: remaining v-length and remaining lower-bound cost to the
    target.  lmin/alpha/beta *_from_s and *_to_t: single-source tables from
    the source node and to the target node under the true-length, alpha, and
    beta edge weightings.  d_a is the summed straight-line distance to the
    source and target locations; d_s is physical obstacle clearance.
    """

    graph: VirtualGraph
    rng: MILRange
    s: str
    t: str
    grid: PhysicalGrid | None = None
    mrl: dict[str, float] = field(default_factory=dict)
    mrc: dict[str, float] = field(default_factory=dict)
    lmin_from_s: dict[str, float] = field(default_factory=dict)
    alpha_from_s: dict[str, float] = field(default_factory=dict)
    beta_from_s: dict[str, float] = field(default_factory=dict)
    lmin_to_t: dict[str, float] = field(default_factory=dict)
    alpha_to_t: dict[str, float] = field(default_factory=dict)
    beta_to_t: dict[str, float] = field(default_factory=dict)

    def d_a(self, v_loc) -> float:
        return dist(v_loc, self.graph.nodes[self.s]) + dist(
            v_loc, self.graph.nodes[self.t]
        )

    def d_s(self, p_loc) -> float:
        return obstacle_distance(self.grid, p_loc)


def _table(g: VirtualGraph, root: str, weight_fn) -> dict[str, float]:
    weight = {
        (u, v): weight_fn(l) for u in g.nodes for v, l in g.neighbors(u).items()
    }
    distv, _ = g.dijkstra(root, weight)
    return distv


def build_heuristics(
    g: VirtualGraph,
    rng: MILRange,
    s: str,
    t: str,
    grid: PhysicalGrid | None = None,
) -> HeuristicTables:
    h = HeuristicTables(graph=g, rng=rng, s=s, t=t, grid=grid)
    h.lmin_from_s = _table(g, s, lambda l: l)
    h.alpha_from_s = _table(g, s, rng.alpha)
    h.beta_from_s = _table(g, s, rng.beta)
    h.lmin_to_t = _table(g, t, lambda l: l)
    h.alpha_to_t = _table(g, t, rng.alpha)
    h.beta_to_t = _table(g, t, rng.beta)
    h.mrl = h.lmin_to_t
    h.mrc = h.alpha_to_t
    return h


def idws(
    query,
    r: float,
    g: VirtualGraph,
    provider: MILProvider,
    heur: HeuristicTables,
    use_heuristic: bool = True,
    use_vwno: bool = True,
    use_pwso: bool = True,
) -> RWPath:
    """Best-first search over loco-states for the relaxed objective
    length + r * cost.

    f = g-value + remaining estimate (remaining length plus r times the
    remaining lower-bound cost).  Ties on f go to the state minimizing
    d_a - d_s, then to lexicographic state order.  The first destination
    state popped is returned.
    """
    src = g.node_at(query.st_s.v_loc)
    tgt = g.node_at(query.target)
    if src is None or tgt is None:
        raise ValueError("query endpoints are not graph nodes")

    def h_of(node: str) -> float:
        if not use_heuristic:
            return 0.0
        mrl = heur.mrl.get(node, math.inf)
        mrc = heur.mrc.get(node, math.inf)
        return mrl + r * mrc

    def tie(st) -> tuple:
        val = 0.0
        if use_vwno:
            val += heur.d_a(st.v_loc)
        if use_pwso:
            ds = heur.d_s(st.p_loc)
            if math.isfinite(ds):
                val -= ds
        return (val,)

    start = query.st_s
    gval: dict[tuple, float] = {start.key(): 0.0}
    acc: dict[tuple, tuple[float, float]] = {start.key(): (0.0, 0.0)}  # (len, cost)
    pred: dict[tuple, tuple] = {}
    state_of = {start.key(): start}
    node_of = {start.key(): src}
    counter = itertools.count()
    pq = [(h_of(src), tie(start), start.key(), next(counter))]
    closed: set[tuple] = set()

    if src == tgt:
        return RWPath(states=[start], length=0.0, cost=0.0)

    while pq:
        f, _, key, _ = heapq.heappop(pq)
        if key in closed:
            continue
        closed.add(key)
        st = state_of[key]
        u = node_of[key]
        if u == tgt:
            states = [st]
            ops: list[OperationSequence] = []
            l, c = acc[key]
            while key in pred:
                key, seq = pred[key]
                states.append(state_of[key])
                ops.append(seq)
            states.reverse()
            ops.reverse()
            return RWPath(states=states, length=l, cost=c, ops=ops)
        base = gval[key]
        l0, c0 = acc[key]
        for v, el in g.neighbors(u).items():
            for st2, tc, seq in provider.successors(st, g.nodes[v]):
                k2 = st2.key()
                if k2 in closed:
                    continue
                ng = base + el + r * tc
                if ng < gval.get(k2, math.inf) - 1e-12:
                    gval[k2] = ng
                    acc[k2] = (l0 + el, c0 + tc)
                    pred[k2] = (key, seq)
                    state_of[k2] = st2
                    node_of[k2] = v
                    heapq.heappush(pq, (ng + h_of(v), tie(st2), k2, next(counter)))
    raise Infeasible("search space exhausted")


def generate_reference(
    query,
    r_alpha: float,
    r_beta: float,
    g: VirtualGraph,
    provider: MILProvider,
    heur: HeuristicTables,
    max_escalations: int = 10,
    **idws_kw,
) -> RWPath:
    """Best budget-feasible path among the two multiplier runs.

    When neither run is feasible, the beta multiplier is doubled repeatedly
    (geometric escalation) before giving up.
    """
    candidates: list[RWPath] = []
    for r in (r_alpha, r_beta):
        try:
            p = idws(query, r, g, provider, heur, **idws_kw)
        except Infeasible:
            continue
        if p.cost <= query.budget + 1e-12:
            candidates.append(p)
    if candidates:
        return min(candidates, key=lambda p: p.length)
    r = max(r_beta, 1.0)
    for _ in range(max_escalations):
        r *= 2.0
        try:
            p = idws(query, r, g, provider, heur, **idws_kw)
        except Infeasible:
            break
        if p.cost <= query.budget + 1e-12:
            return p
    raise ReferenceNotFound("no feasible reference path at any multiplier")
