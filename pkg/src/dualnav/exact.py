"""Exact budget-constrained routing: length-ordered dynamic program and a
knapsack-instance generator used as an adversarial oracle."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

from .geometry import dist
from .mil import MILProvider, TableMILProvider
from .paths import Infeasible, OperationSequence, RWPath
from .worlds import LocoState, VirtualGraph

LEN_TOL = 1e-9


@dataclass(frozen=True)
class DROPQuery:
    """One routing query: start loco-state, destination virtual location,
    cost budget C, and the approximation knob epsilon (ignored by exact
    solvers)."""

    st_s: LocoState
    target: tuple[float, float]
    budget: float
    epsilon: float = 0.1


def _lkey(l: float) -> float:
    return round(l, 9)


def basic_dp(
    query: DROPQuery, graph: VirtualGraph, provider: MILProvider
) -> RWPath:
    """Minimum-length route within the cost budget, by dynamic programming
    over (loco-state, accumulated length) in increasing length order.

    The first destination state reached (smallest length) wins; equal-length
    candidates are settled by lower cost, then lexicographic state order.
    """
    src = graph.node_at(query.st_s.v_loc)
    tgt = graph.node_at(query.target)
    if src is None or tgt is None:
        raise ValueError("query endpoints are not graph nodes")
    if src == tgt:
        return RWPath(states=[query.st_s], length=0.0, cost=0.0)

    start_key = (query.st_s.key(), 0.0)
    cost: dict[tuple, float] = {start_key: 0.0}
    pred: dict[tuple, tuple] = {}
    state_of: dict[tuple, LocoState] = {start_key: query.st_s}
    node_of: dict[tuple, str] = {start_key: src}
    counter = itertools.count()
    pq: list = [(0.0, 0.0, next(counter), start_key)]
    settled: set[tuple] = set()
    best_candidates: list[tuple] = []
    best_len = None

    while pq:
        l, c, _, key = heapq.heappop(pq)
        if best_len is not None and l > best_len + LEN_TOL:
            break
        if key in settled or c > cost.get(key, math.inf) + 1e-12:
            continue
        settled.add(key)
        st = state_of[key]
        u = node_of[key]
        if u == tgt and c <= query.budget + 1e-12:
            if best_len is None:
                best_len = l
            best_candidates.append((c, st.key(), key))
            continue
        for v, el in graph.neighbors(u).items():
            nl = l + el
            for st2, tc, seq in provider.successors(st, graph.nodes[v]):
                nc = c + tc
                if nc > query.budget + 1e-12:
                    continue
                k2 = (st2.key(), _lkey(nl))
                if nc < cost.get(k2, math.inf) - 1e-12:
                    cost[k2] = nc
                    pred[k2] = (key, seq)
                    state_of[k2] = st2
                    node_of[k2] = v
                    heapq.heappush(pq, (nl, nc, next(counter), k2))

    if not best_candidates:
        raise Infeasible("no route within budget")
    best_candidates.sort()
    _, _, key = best_candidates[0]
    states = [state_of[key]]
    ops: list[OperationSequence] = []
    total_cost = cost[key]
    total_len = key[1]
    while key in pred:
        key, seq = pred[key]
        states.append(state_of[key])
        ops.append(seq)
    states.reverse()
    ops.reverse()
    return RWPath(states=states, length=total_len, cost=total_cost, ops=ops)


# ---------------------------------------------------------------------------
# Knapsack reduction
# ---------------------------------------------------------------------------

@dataclass
class KnapsackInstance:
    """A 0/1 knapsack encoded as a routing instance.

    Choosing the detour through b_{i+1} on hop i selects item i+1: it saves
    v_{i+1} length but charges w_{i+1} cost.  With budget W, the
    minimum-length route encodes a maximum-value packing.
    """

    values: list[float]
    weights: list[float]
    capacity: float
    graph: VirtualGraph
    provider: TableMILProvider
    query: DROPQuery

    def decode(self, path: RWPath) -> list[int]:
        """Selected item indices (0-based) read off the b-node visits."""
        chosen = []
        for st in path.states:
            name = self.graph.node_at(st.v_loc)
            if name and name.startswith("b"):
                chosen.append(int(name[1:]) - 1)
        return sorted(chosen)


def kp_to_drop(
    values: list[float], weights: list[float], capacity: float
) -> KnapsackInstance:
    """Build the gadget chain a_0 .. a_n with item detours b_1 .. b_n."""
    n = len(values)
    vmax = max(values)
    g = VirtualGraph()
    states: dict[str, LocoState] = {}
    for i in range(n + 1):
        g.add_node(f"a{i}", (float(i), 0.0))
    for i in range(1, n + 1):
        g.add_node(f"b{i}", (i - 0.5, 1.0))
    records = []

    def link(u: str, v: str, length: float, cost: float) -> None:
        g.add_edge(u, v, length)
        for a, b in ((u, v), (v, u)):
            records.append((_node_state(g, a), _node_state(g, b), cost))

    for i in range(n):
        link(f"a{i}", f"a{i+1}", vmax + 2.0, 0.0)
        link(f"a{i}", f"b{i+1}", vmax - values[i] + 1.0, weights[i])
        link(f"b{i+1}", f"a{i+1}", 1.0, 0.0)
    provider = TableMILProvider(records)
    st_s = _node_state(g, "a0")
    query = DROPQuery(st_s=st_s, target=g.nodes[f"a{n}"], budget=capacity)
    return KnapsackInstance(
        values=list(values),
        weights=list(weights),
        capacity=capacity,
        graph=g,
        provider=provider,
        query=query,
    )


def _node_state(g: VirtualGraph, name: str) -> LocoState:
    p = g.nodes[name]
    return LocoState(v_loc=p, v_heading=0.0, p_loc=p, p_heading=0.0)
