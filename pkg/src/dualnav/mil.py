"""Minimum incurred loss (MIL) between neighboring loco-states, range
tables of per-length cost bounds, and greedy path realization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .geometry import EPS, Point, dist
from .kinematics import (
    CURVATURE,
    RESET,
    ROTATION,
    TRANSLATION,
    Collision,
    CostModel,
    OutOfWorld,
    RWOperation,
    Worlds,
    apply_operation,
    operation_cost,
    sequence_cost,
)
from .paths import OperationSequence, RWPath, Unrealizable
from .worlds import LocoState, PhysicalGrid, VirtualGraph


class NotNeighbors(Exception):
    """The two loco-states' virtual locations share no v-edge."""


def bin_length(l: float, quantum: float = 0.1) -> float:
    """Quantize a length to its bin key (one decimal by default)."""
    return round(round(l / quantum) * quantum, 6)


# ---------------------------------------------------------------------------
# Providers
# ---------------------------------------------------------------------------

class MILProvider:
    """Interface: per-transition minimum cost and successor enumeration."""

    def mil(self, st1: LocoState, st2: LocoState) -> float:
        raise NotImplementedError

    def successors(
        self, st: LocoState, v_target: Point
    ) -> list[tuple[LocoState, float, OperationSequence]]:
        """All realizable next loco-states at v_target, with cost and ops."""
        raise NotImplementedError

    def states_at(self, v_loc: Point) -> list[LocoState]:
        """Known loco-states whose virtual location is v_loc."""
        raise NotImplementedError


class TableMILProvider(MILProvider):
    """Authoritative explicit-cost table; entries are never recomputed.

    Built from records (st1, st2, cost).  Optional per-entry operation
    sequences may be attached; otherwise an empty sequence carrying the cost
    is returned.
    """

    def __init__(self, records: list[tuple[LocoState, LocoState, float]]) -> None:
        self._cost: dict[tuple, float] = {}
        self._by_source: dict[tuple, list[tuple[LocoState, float]]] = {}
        self._by_node: dict[Point, list[LocoState]] = {}
        for st1, st2, c in records:
            self._cost[(st1.key(), st2.key())] = c
            self._by_source.setdefault(st1.key(), []).append((st2, c))
            for st in (st1, st2):
                bucket = self._by_node.setdefault(st.v_loc, [])
                if all(st.key() != o.key() for o in bucket):
                    bucket.append(st)

    def mil(self, st1: LocoState, st2: LocoState) -> float:
        return self._cost.get((st1.key(), st2.key()), math.inf)

    def successors(self, st, v_target):
        out = []
        for st2, c in self._by_source.get(st.key(), []):
            if dist(st2.v_loc, v_target) < 1e-6:
                out.append((st2, c, OperationSequence(ops=(), total_cost=c)))
        return out

    def states_at(self, v_loc):
        for loc, sts in self._by_node.items():
            if dist(loc, v_loc) < 1e-6:
                return list(sts)
        return []


def _gain_grid(lo: float, hi: float, identity: float, n: int = 21) -> list[float]:
    """n gains spanning twice the non-detectable interval around identity,
    always including the identity value and the interval endpoints."""
    span_lo = identity - 2.0 * (identity - lo)
    span_hi = identity + 2.0 * (hi - identity)
    vals = [span_lo + (span_hi - span_lo) * i / (n - 1) for i in range(n)]
    for v in (lo, hi, identity):
        if not any(abs(x - v) < 1e-9 for x in vals):
            vals.append(v)
    return sorted(vals)


class KinematicMILProvider(MILProvider):
    """MIL computed by searching a discrete operation catalog.

    Catalog shape: an optional Reset (heading-lattice angle), then an
    optional Rotation aligning the virtual heading with the target bearing,
    then a single walking operation (Translation with gain m_T, or Curvature
    with gain m_C) that lands the virtual location exactly on the target.
    """

    def __init__(
        self,
        worlds: Worlds,
        model: CostModel,
        graph: VirtualGraph | None = None,
        n_gains: int = 21,
    ) -> None:
        self.worlds = worlds
        self.model = model
        self.graph = graph
        th = model.thresholds
        self.mt_grid = [g for g in _gain_grid(*th[TRANSLATION], 1.0, n_gains) if g > EPS]
        self.mr_grid = [g for g in _gain_grid(*th[ROTATION], 1.0, n_gains) if abs(g) > EPS]
        self.mc_grid = _gain_grid(*th[CURVATURE], 0.0, n_gains)
        ors = worlds.orientations
        self.reset_angles = [0.0] + [
            a if a <= 180.0 else a - 360.0 for a in (ors.angles if ors else ())
            if abs(a) > EPS
        ]
        self._succ_memo: dict[tuple, list] = {}
        self._rel_memo: dict[tuple, list] = {}

    def mil(self, st1: LocoState, st2: LocoState) -> float:
        best = math.inf
        for st, c, _ in self.successors(st1, st2.v_loc):
            if st.key() == st2.key():
                best = min(best, c)
        return best

    def states_at(self, v_loc):
        return []

    def successors(self, st, v_target):
        memo_key = (st.key(), (round(v_target[0], 6), round(v_target[1], 6)))
        cached = self._succ_memo.get(memo_key)
        if cached is not None:
            return cached
        d = dist(st.v_loc, v_target)
        if d < EPS:
            raise NotNeighbors("target coincides with source virtual location")
        bearing = math.degrees(math.atan2(v_target[1] - st.v_loc[1], v_target[0] - st.v_loc[0])) % 360.0
        ors = self.worlds.orientations
        if self.worlds.snap and ors is not None:
            # The physics of a transition only depends on the physical pose,
            # the relative turn to the bearing, and the hop distance, so the
            # expensive catalog enumeration is shared across virtual
            # positions with the same relative geometry.
            vh = ors.snap(bearing)
            if abs((vh - bearing + 180.0) % 360.0 - 180.0) > 1e-6:
                out = []  # bearing off the heading lattice: nothing aligns
            else:
                turn = (bearing - st.v_heading + 180.0) % 360.0 - 180.0
                rel_key = (
                    round(st.p_loc[0], 9),
                    round(st.p_loc[1], 9),
                    round(st.p_heading, 9),
                    round(turn, 9),
                    round(d, 9),
                )
                entries = self._rel_memo.get(rel_key)
                if entries is None:
                    entries = [
                        (s.p_loc, s.p_heading, c, seq)
                        for s, c, seq in self._enumerate(st, bearing, d)
                    ]
                    self._rel_memo[rel_key] = entries
                out = [
                    (LocoState(v_target, vh, p_loc, p_heading), c, seq)
                    for p_loc, p_heading, c, seq in entries
                ]
        else:
            out = [
                (LocoState(v_target, s.v_heading, s.p_loc, s.p_heading), c, seq)
                for s, c, seq in self._enumerate(st, bearing, d)
            ]
        out.sort(key=lambda t: (t[1], t[0].key()))
        self._succ_memo[memo_key] = out
        return out

    def _enumerate(self, st, bearing, d):
        """All distinct landing states (cheapest realization each) for one
        hop of length d toward the given bearing."""
        best: dict[tuple, tuple[LocoState, float, OperationSequence]] = {}
        walks = self._walk_ops(d)
        for reset in self.reset_angles:
            prefix: list[RWOperation] = []
            st_r = st
            if abs(reset) > EPS:
                op = RWOperation(RESET, reset)
                try:
                    st_r = apply_operation(st_r, op, self.worlds)
                except (Collision, OutOfWorld):
                    continue
                prefix = [op]
            turn = (bearing - st_r.v_heading + 180.0) % 360.0 - 180.0
            rot_choices: list[list[RWOperation]] = []
            if abs(turn) <= EPS:
                rot_choices.append([])
            else:
                for mr in self.mr_grid:
                    rot_choices.append([RWOperation(ROTATION, mr, angle=turn / mr)])
            # Distinct gains frequently snap to the same post-rotation pose;
            # keep only the cheapest rotation per resulting state.
            staged: dict[tuple, tuple[LocoState, list[RWOperation], float]] = {}
            for rot in rot_choices:
                st_a = st_r
                ok = True
                for op in rot:
                    try:
                        st_a = apply_operation(st_a, op, self.worlds)
                    except (Collision, OutOfWorld):
                        ok = False
                        break
                if not ok:
                    continue
                if abs((st_a.v_heading - bearing + 180.0) % 360.0 - 180.0) > 1e-6:
                    # heading snap moved us off the required bearing
                    continue
                pre_cost = sequence_cost(prefix + rot, self.model)
                k = st_a.key()
                if k not in staged or pre_cost < staged[k][2] - EPS:
                    staged[k] = (st_a, prefix + rot, pre_cost)
            for st_a, pre_ops, pre_cost in staged.values():
                for walk in walks:
                    try:
                        st_b = apply_operation(st_a, walk, self.worlds)
                    except (Collision, OutOfWorld):
                        continue
                    c = pre_cost + operation_cost(walk, self.model)
                    st_b = LocoState(st_b.v_loc, st_b.v_heading, st_b.p_loc, st_b.p_heading)
                    k = st_b.key()
                    if k not in best or c < best[k][1] - EPS:
                        ops = tuple(pre_ops + [walk])
                        best[k] = (st_b, c, OperationSequence(ops=ops, total_cost=c))
        return list(best.values())

    def _walk_ops(self, d: float) -> list[RWOperation]:
        ops = [RWOperation(TRANSLATION, mt, walk_length=d / mt) for mt in self.mt_grid]
        ops.extend(
            RWOperation(CURVATURE, mc, walk_length=d)
            for mc in self.mc_grid
            if abs(mc) > EPS
        )
        return ops


def compute_mil(
    st1: LocoState,
    st2: LocoState,
    provider: MILProvider,
) -> tuple[float, OperationSequence]:
    """Minimum cost and a realizing sequence for a neighboring transition."""
    best = None
    for st, c, seq in provider.successors(st1, st2.v_loc):
        if st.key() == st2.key() and (best is None or c < best[0]):
            best = (c, seq)
    if best is None:
        raise Unrealizable(f"no catalog sequence from {st1} to {st2}")
    return best


# ---------------------------------------------------------------------------
# MIL Range
# ---------------------------------------------------------------------------

@dataclass
class MILRange:
    """Per-length-bin cost bounds: alpha = best case over all state pairs,
    beta = worst source's best target."""

    quantum: float = 0.1
    bins: dict[float, tuple[float, float]] = field(default_factory=dict)

    def alpha(self, l: float) -> float:
        """Lower bound for one edge; absent bins contribute 0."""
        b = self.bins.get(bin_length(l, self.quantum))
        return b[0] if b else 0.0

    def beta(self, l: float) -> float:
        """Upper bound for one edge; absent bins are unbounded."""
        b = self.bins.get(bin_length(l, self.quantum))
        return b[1] if b else math.inf

    def to_csv(self) -> str:
        lines = ["length_bin,alpha,beta"]
        for l in sorted(self.bins):
            a, b = self.bins[l]
            lines.append(f"{l},{a},{b}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, quantum: float = 0.1) -> "MILRange":
        rng = cls(quantum=quantum)
        for line in text.strip().splitlines()[1:]:
            l, a, b = line.split(",")
            rng.bins[bin_length(float(l), quantum)] = (float(a), float(b))
        return rng


def build_mil_range(
    graph: VirtualGraph,
    provider: MILProvider,
    states_by_node: dict[str, list[LocoState]] | None = None,
    quantum: float = 0.1,
) -> MILRange:
    """Scan every directed v-edge and every known source loco-state on it.

    For each length bin: alpha is the minimum transition cost over all
    realizable pairs; beta is the maximum, over source states with at least
    one realizable target, of the cheapest realizable target.  Sources with
    no realizable target are skipped in the beta maximum.
    """
    per_bin_alpha: dict[float, float] = {}
    per_bin_beta: dict[float, float] = {}
    for u in graph.nodes:
        for v, l in graph.neighbors(u).items():
            b = bin_length(l, quantum)
            sources = (
                states_by_node.get(u, [])
                if states_by_node is not None
                else provider.states_at(graph.nodes[u])
            )
            for st1 in sources:
                if dist(st1.v_loc, graph.nodes[u]) > 1e-6:
                    continue
                succ = provider.successors(st1, graph.nodes[v])
                if not succ:
                    continue
                costs = [c for _, c, _ in succ]
                per_bin_alpha[b] = min(per_bin_alpha.get(b, math.inf), min(costs))
                per_bin_beta[b] = max(per_bin_beta.get(b, 0.0), min(costs))
    rng = MILRange(quantum=quantum)
    for b in per_bin_alpha:
        rng.bins[b] = (per_bin_alpha[b], per_bin_beta[b])
    return rng


def aggregate_bounds(
    v_path: list[str], graph: VirtualGraph, rng: MILRange
) -> tuple[float, float]:
    """Summed per-edge bounds along a v-path: (alpha-sum, beta-sum)."""
    a = 0.0
    b = 0.0
    for u, v in zip(v_path, v_path[1:]):
        if v not in graph.neighbors(u):
            raise ValueError(f"not a path: no edge {u}-{v}")
        l = graph.edge_length(u, v)
        a += rng.alpha(l)
        b += rng.beta(l)
    return a, b


# ---------------------------------------------------------------------------
# Greedy realization
# ---------------------------------------------------------------------------

def obstacle_distance(grid: PhysicalGrid | None, p: Point) -> float:
    """Distance from p to the nearest obstacle cell center (large when no
    grid or no obstacles)."""
    if grid is None:
        return math.inf
    best = math.inf
    ox, oy = grid.origin
    for r in range(grid.n_rows):
        for c in range(grid.n_cols):
            if grid.cells[r][c]:
                cx = ox + (c + 0.5) * grid.cell_size
                cy = oy + (r + 0.5) * grid.cell_size
                best = min(best, dist(p, (cx, cy)))
    return best


def greedy_realize(
    v_path: list[str],
    st_s: LocoState,
    graph: VirtualGraph,
    provider: MILProvider,
    grid: PhysicalGrid | None = None,
) -> RWPath:
    """Realize a v-path hop by hop, always taking the cheapest next
    loco-state; cost ties go to the successor farthest from physical
    obstacles, then to the lexicographically smallest state."""
    if dist(st_s.v_loc, graph.nodes[v_path[0]]) > 1e-6:
        raise ValueError("v_path does not start at the source loco-state")
    st = st_s
    states = [st_s]
    ops: list[OperationSequence] = []
    total_len = 0.0
    total_cost = 0.0
    for u, v in zip(v_path, v_path[1:]):
        succ = provider.successors(st, graph.nodes[v])
        if not succ:
            raise Unrealizable(f"no realizable successor on edge {u}-{v}")
        succ.sort(
            key=lambda t: (t[1], -obstacle_distance(grid, t[0].p_loc), t[0].key())
        )
        st, c, seq = succ[0]
        states.append(st)
        ops.append(seq)
        total_len += graph.edge_length(u, v)
        total_cost += c
    return RWPath(states=states, length=total_len, cost=total_cost, ops=ops)
