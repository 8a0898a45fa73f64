"""Comparison algorithms: minimum-cost search, k-shortest-paths with
resets, and the single-world estimated-cost constrained search."""

from __future__ import annotations

import heapq
import itertools
import math

from .geometry import EPS, dist
from .kinematics import (
    RESET,
    ROTATION,
    TRANSLATION,
    CostModel,
    RWOperation,
    operation_cost,
)
from .mil import MILProvider, MILRange, greedy_realize
from .paths import Infeasible, OperationSequence, RWPath, Unrealizable
from .worlds import (
    LocoState,
    OrientationSet,
    PhysicalGrid,
    VirtualGraph,
    path_clear_physical,
)


def mcp(query, g: VirtualGraph, provider: MILProvider) -> RWPath:
    """Minimum total-cost route over the loco-state space (length ignored);
    infeasible when even that minimum exceeds the budget."""
    src = g.node_at(query.st_s.v_loc)
    tgt = g.node_at(query.target)
    if src == tgt:
        return RWPath(states=[query.st_s], length=0.0, cost=0.0)
    skey = query.st_s.key()
    best: dict[tuple, tuple[float, float]] = {skey: (0.0, 0.0)}  # (cost, length)
    pred: dict[tuple, tuple] = {}
    state_of = {skey: query.st_s}
    node_of = {skey: src}
    counter = itertools.count()
    pq = [(0.0, 0.0, next(counter), skey)]
    done: set[tuple] = set()
    while pq:
        c, l, _, key = heapq.heappop(pq)
        if key in done:
            continue
        done.add(key)
        st = state_of[key]
        u = node_of[key]
        if u == tgt:
            if c > query.budget + 1e-12:
                raise Infeasible(f"minimum cost {c} exceeds budget")
            states = [st]
            ops = []
            while key in pred:
                key, seq = pred[key]
                states.append(state_of[key])
                ops.append(seq)
            states.reverse()
            ops.reverse()
            return RWPath(states=states, length=l, cost=c, ops=ops)
        for v, el in g.neighbors(u).items():
            for st2, tc, seq in provider.successors(st, g.nodes[v]):
                k2 = st2.key()
                nc, nl = c + tc, l + el
                cur = best.get(k2)
                if cur is None or nc < cur[0] - 1e-12 or (
                    abs(nc - cur[0]) <= 1e-12 and nl < cur[1] - 1e-12
                ):
                    best[k2] = (nc, nl)
                    pred[k2] = (key, seq)
                    state_of[k2] = st2
                    node_of[k2] = v
                    heapq.heappush(pq, (nc, nl, next(counter), k2))
    raise Infeasible("destination unreachable")


# ---------------------------------------------------------------------------
# k shortest loopless paths with reset-based realization
# ---------------------------------------------------------------------------

def _dijkstra_path(
    g: VirtualGraph,
    s: str,
    t: str,
    banned_edges: set[tuple[str, str]],
    banned_nodes: set[str],
) -> tuple[list[str], float] | None:
    distv = {s: 0.0}
    pred: dict[str, str] = {}
    pq = [(0.0, s)]
    done = set()
    while pq:
        d, u = heapq.heappop(pq)
        if u in done:
            continue
        done.add(u)
        if u == t:
            break
        for v, l in g.neighbors(u).items():
            if v in banned_nodes or (u, v) in banned_edges:
                continue
            nd = d + l
            if nd < distv.get(v, math.inf) - EPS:
                distv[v] = nd
                pred[v] = u
                heapq.heappush(pq, (nd, v))
    if t not in distv:
        return None
    path = [t]
    while path[-1] != s:
        path.append(pred[path[-1]])
    path.reverse()
    return path, distv[t]


def yen_k_shortest(g: VirtualGraph, s: str, t: str, k: int) -> list[list[str]]:
    """k shortest loopless v-paths by deviation enumeration."""
    first = _dijkstra_path(g, s, t, set(), set())
    if first is None:
        return []
    paths = [first]
    candidates: list[tuple[float, list[str]]] = []
    seen = {tuple(first[0])}
    while len(paths) < k:
        prev = paths[-1][0]
        for i in range(len(prev) - 1):
            spur = prev[i]
            root = prev[: i + 1]
            banned_edges = set()
            for p, _ in paths:
                if p[: i + 1] == root and len(p) > i + 1:
                    banned_edges.add((p[i], p[i + 1]))
                    banned_edges.add((p[i + 1], p[i]))
            banned_nodes = set(root[:-1])
            rest = _dijkstra_path(g, spur, t, banned_edges, banned_nodes)
            if rest is None:
                continue
            cand = root[:-1] + rest[0]
            key = tuple(cand)
            if key in seen:
                continue
            seen.add(key)
            length = sum(
                g.edge_length(u, v) for u, v in zip(cand, cand[1:])
            )
            heapq.heappush(candidates, (length, cand))
        if not candidates:
            break
        length, cand = heapq.heappop(candidates)
        paths.append((cand, length))
    return [p for p, _ in paths]


def _realize_with_resets(
    v_path: list[str],
    st_s: LocoState,
    g: VirtualGraph,
    grid: PhysicalGrid | None,
    orientations: OrientationSet,
    model: CostModel,
) -> RWPath:
    """Walk the v-path with identity gains, inserting the smallest reset
    rotation whenever the next straight physical step would collide."""
    st = st_s
    states = [st]
    hops: list[OperationSequence] = []
    total_cost = 0.0
    total_len = 0.0
    for u, v in zip(v_path, v_path[1:]):
        a, b = g.nodes[u], g.nodes[v]
        d = g.edge_length(u, v)
        step = dist(a, b)
        bearing = math.degrees(math.atan2(b[1] - a[1], b[0] - a[0])) % 360.0
        turn = (bearing - st.v_heading + 180.0) % 360.0 - 180.0
        ops: list[RWOperation] = []
        v_h = bearing
        p_h = (st.p_heading + turn) % 360.0
        if abs(turn) > EPS:
            ops.append(RWOperation(ROTATION, 1.0, angle=turn))
        # find a reset (possibly zero) that clears the straight step
        chosen = None
        for reset in sorted(
            ((a_ % 360.0 + 180.0) % 360.0 - 180.0 for a_ in [0.0, *orientations.angles]),
            key=lambda z: (abs(z), -z),
        ):
            cand_h = (p_h + reset) % 360.0
            th = math.radians(cand_h)
            end = (st.p_loc[0] + step * math.cos(th), st.p_loc[1] + step * math.sin(th))
            if grid is None or (
                grid.point_free(end)
                and path_clear_physical(grid, [st.p_loc, end])
            ):
                chosen = (reset, cand_h, end)
                break
        if chosen is None:
            raise Unrealizable(f"no reset clears the step {u}-{v}")
        reset, cand_h, end = chosen
        if abs(reset) > EPS:
            ops.append(RWOperation(RESET, reset))
        ops.append(RWOperation(TRANSLATION, 1.0, walk_length=step))
        hop_cost = sum(operation_cost(op, model) for op in ops)
        st = LocoState(b, v_h, end, cand_h)
        states.append(st)
        hops.append(OperationSequence(ops=tuple(ops), total_cost=hop_cost))
        total_cost += hop_cost
        total_len += d
    return RWPath(states=states, length=total_len, cost=total_cost, ops=hops)


def ksp_reset(
    query,
    g: VirtualGraph,
    grid: PhysicalGrid | None,
    orientations: OrientationSet,
    model: CostModel,
    k: int = 5,
) -> RWPath:
    """Realize the k shortest v-paths by straight identity-gain walking with
    resets, returning the cheapest budget-feasible candidate."""
    src = g.node_at(query.st_s.v_loc)
    tgt = g.node_at(query.target)
    if src == tgt:
        return RWPath(states=[query.st_s], length=0.0, cost=0.0)
    best: RWPath | None = None
    for v_path in yen_k_shortest(g, src, tgt, k):
        try:
            p = _realize_with_resets(v_path, query.st_s, g, grid, orientations, model)
        except Unrealizable:
            continue
        if best is None or p.cost < best.cost - 1e-12:
            best = p
    if best is None or best.cost > query.budget + 1e-12:
        found = f" (best cost {best.cost})" if best is not None else ""
        raise Infeasible("no candidate within budget" + found)
    return best


# ---------------------------------------------------------------------------
# Estimated-cost single-world constrained search
# ---------------------------------------------------------------------------

def cola_estimated(
    query,
    g: VirtualGraph,
    provider: MILProvider,
    rng: MILRange,
    grid: PhysicalGrid | None = None,
) -> RWPath:
    """Constrained shortest path on the v-graph alone, with each edge
    charged its upper-bound cost; the winner is then greedily realized."""
    src = g.node_at(query.st_s.v_loc)
    tgt = g.node_at(query.target)
    if src == tgt:
        return RWPath(states=[query.st_s], length=0.0, cost=0.0)
    # bicriteria search: Pareto labels (length, estimated cost) per node
    labels: dict[str, list[tuple[float, float]]] = {src: [(0.0, 0.0)]}
    pred: dict[tuple[str, float, float], tuple] = {}
    counter = itertools.count()
    pq = [(0.0, 0.0, next(counter), src)]
    best_t: tuple | None = None
    while pq:
        l, b, _, u = heapq.heappop(pq)
        if b > query.budget + 1e-12:
            continue
        if u == tgt:
            best_t = (u, l, b)
            break
        if any(
            (ol < l - 1e-12 and ob <= b + 1e-12)
            or (ol <= l + 1e-12 and ob < b - 1e-12)
            for ol, ob in labels.get(u, [])
            if (ol, ob) != (l, b)
        ):
            continue
        for v, el in g.neighbors(u).items():
            nl, nb = l + el, b + rng.beta(el)
            if nb > query.budget + 1e-12:
                continue
            dominated = any(
                ol <= nl + 1e-12 and ob <= nb + 1e-12 for ol, ob in labels.get(v, [])
            )
            if dominated:
                continue
            labels.setdefault(v, []).append((nl, nb))
            pred[(v, round(nl, 9), round(nb, 9))] = (u, round(l, 9), round(b, 9))
            heapq.heappush(pq, (nl, nb, next(counter), v))
    if best_t is None:
        raise Infeasible("no v-path within the estimated budget")
    node, l, b = best_t
    path = [node]
    key = (node, round(l, 9), round(b, 9))
    while key in pred:
        key = pred[key]
        path.append(key[0])
    path.reverse()
    realized = greedy_realize(path, query.st_s, g, provider, grid)
    if realized.cost > query.budget + 1e-12:
        raise Infeasible(f"realized cost {realized.cost} exceeds budget")
    return realized
