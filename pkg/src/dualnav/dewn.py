"""End-to-end approximate solver: multiplier search, reference path,
space pruning, rounded DP, and the optional orientation collapse."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .approx import rounded_dp
from .exact import DROPQuery
from .mil import MILProvider, MILRange, greedy_realize
from .paths import Infeasible, RWPath, Unrealizable
from .pruning import PruneResult, ppnp_search
from .search import (
    HeuristicTables,
    ReferenceNotFound,
    build_heuristics,
    generate_reference,
    idws,
)
from .simplify import INFEASIBLE, MULTIPLIERS, SHORTEST_FEASIBLE, MultiplierResult, csms
from .worlds import LocoState, PhysicalGrid, VirtualGraph


@dataclass(frozen=True)
class DewnOptions:
    epsilon: float = 0.1
    delta: float | None = None
    cos_simplify: bool = False
    reference_only: bool = False
    disable_pruning: tuple[str, ...] = ()
    disable_ordering: tuple[str, ...] = ()
    c_theta: float = 1.0  # max cost of one orientation correction
    # Attempt a greedy realization of the plain shortest v-path up front.
    # When it fits the budget its length equals the unconstrained lower
    # bound, so it is optimal and the pipeline can stop immediately.
    shortest_first: bool = True


@dataclass
class DewnDetails:
    multipliers: MultiplierResult | None = None
    reference: RWPath | None = None
    prune: PruneResult | None = None
    rounded: RWPath | None = None
    heuristics: HeuristicTables | None = None
    shortcut: bool = False


def hop_diameter(g: VirtualGraph) -> int:
    """Largest minimum hop count between any connected node pair."""
    best = 0
    for s in g.nodes:
        depth = {s: 0}
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for v in g.neighbors(u):
                if v not in depth:
                    depth[v] = depth[u] + 1
                    dq.append(v)
        if depth:
            best = max(best, max(depth.values()))
    return best


def dewn(
    query: DROPQuery,
    g: VirtualGraph,
    provider: MILProvider,
    rng: MILRange,
    grid: PhysicalGrid | None = None,
    options: DewnOptions = DewnOptions(),
    details: DewnDetails | None = None,
    initial_length_bound: float | None = None,
) -> RWPath:
    """Minimum-length budget-feasible route, within a 1+epsilon factor."""
    if options.cos_simplify:
        return _dewn_cos(query, g, provider, rng, grid, options, details)
    return _dewn_core(query, g, provider, rng, grid, options, details, initial_length_bound)


def _dewn_core(
    query, g, provider, rng, grid, options, details, initial_length_bound=None
) -> RWPath:
    det = details if details is not None else DewnDetails()
    src = g.node_at(query.st_s.v_loc)
    tgt = g.node_at(query.target)
    if src is None or tgt is None:
        raise ValueError("query endpoints are not graph nodes")
    if src == tgt:
        return RWPath(states=[query.st_s], length=0.0, cost=0.0)

    mres = csms(g, src, tgt, rng, query.budget, delta=options.delta)
    det.multipliers = mres
    if mres.verdict == INFEASIBLE:
        raise Infeasible("lower-bound cost of every route exceeds the budget")
    if mres.verdict == SHORTEST_FEASIBLE or options.shortest_first:
        found = g.shortest_path(src, tgt)
        sp = found[0] if found else mres.shortest
        if sp is not None:
            try:
                path = greedy_realize(sp, query.st_s, g, provider, grid)
                if path.cost <= query.budget + 1e-12:
                    det.shortcut = True
                    return path
            except Unrealizable:
                pass  # fall through to the full pipeline

    heur = build_heuristics(g, rng, src, tgt, grid)
    det.heuristics = heur
    ord_kw = dict(
        use_heuristic="TECO" not in options.disable_ordering,
        use_vwno="VWNO" not in options.disable_ordering,
        use_pwso="PWSO" not in options.disable_ordering,
    )
    r_a = mres.r_alpha_star if mres.r_alpha_star is not None else 0.0
    r_b = mres.r_beta_star if mres.r_beta_star is not None else r_a
    reference = generate_reference(query, r_a, r_b, g, provider, heur, **ord_kw)
    det.reference = reference
    if options.reference_only:
        return reference

    L_tilde0 = reference.length
    if initial_length_bound is not None:
        L_tilde0 = min(L_tilde0, initial_length_bound)
    prune = ppnp_search(
        query, L_tilde0, g, provider, heur, disable_pruning=options.disable_pruning
    )
    det.prune = prune

    sp = g.shortest_path(src, tgt)
    L_lower = sp[1] if sp else reference.length
    try:
        rounded = rounded_dp(
            prune.X, query, g, provider, L_lower, reference.length, options.epsilon
        )
        det.rounded = rounded
    except Infeasible:
        return reference
    if rounded.length < reference.length - 1e-12 or (
        abs(rounded.length - reference.length) <= 1e-12
        and rounded.cost < reference.cost
    ):
        return rounded
    return reference


# ---------------------------------------------------------------------------
# Orientation collapse
# ---------------------------------------------------------------------------

class CollapsedProvider(MILProvider):
    """View of a provider with every heading forced to 0.

    States that differ only by heading merge; transition cost is the minimum
    over merged representatives, making it a relaxation of the base space.
    """

    def __init__(self, base: MILProvider, st_s: LocoState) -> None:
        self.base = base
        self._reps: dict[tuple, list[LocoState]] = {}
        self._remember(st_s)

    @staticmethod
    def collapse(st: LocoState) -> LocoState:
        return LocoState(st.v_loc, 0.0, st.p_loc, 0.0)

    def _remember(self, st: LocoState) -> None:
        ck = self.collapse(st).key()
        bucket = self._reps.setdefault(ck, [])
        if all(st.key() != o.key() for o in bucket):
            bucket.append(st)

    def mil(self, st1, st2):
        best = math.inf
        for s, c, _ in self.successors(st1, st2.v_loc):
            if s.key() == st2.key():
                best = min(best, c)
        return best

    def successors(self, st, v_target):
        grouped: dict[tuple, tuple[LocoState, float, object]] = {}
        for rep in self._reps.get(self.collapse(st).key(), []):
            for st2, c, seq in self.base.successors(rep, v_target):
                self._remember(st2)
                cst = self.collapse(st2)
                k = cst.key()
                if k not in grouped or c < grouped[k][1] - 1e-12:
                    grouped[k] = (cst, c, seq)
        return sorted(grouped.values(), key=lambda t: (t[1], t[0].key()))

    def states_at(self, v_loc):
        seen: dict[tuple, LocoState] = {}
        for st in self.base.states_at(v_loc):
            cst = self.collapse(st)
            self._remember(st)
            seen[cst.key()] = cst
        return list(seen.values())


def _dewn_cos(query, g, provider, rng, grid, options, details) -> RWPath:
    """Solve in the collapsed-heading space, then re-realize the winning
    v-path with the full catalog (orientation corrections re-inserted).

    Guard: when the corrected cost exceeds C + c_theta * hop-diameter, the
    plain pipeline result is used instead, preserving the cost bound.
    """
    collapsed = CollapsedProvider(provider, query.st_s)
    cq = DROPQuery(
        st_s=CollapsedProvider.collapse(query.st_s),
        target=query.target,
        budget=query.budget,
        epsilon=query.epsilon,
    )
    plain_opts = DewnOptions(
        epsilon=options.epsilon,
        delta=options.delta,
        reference_only=options.reference_only,
        disable_pruning=options.disable_pruning,
        disable_ordering=options.disable_ordering,
        c_theta=options.c_theta,
        shortest_first=options.shortest_first,
    )
    bound = query.budget + options.c_theta * hop_diameter(g)
    try:
        cpath = _dewn_core(cq, g, collapsed, rng, grid, plain_opts, details)
        v_path = [g.node_at(st.v_loc) for st in cpath.states]
        realized = greedy_realize(v_path, query.st_s, g, provider, grid)
        if realized.cost <= bound + 1e-9:
            return realized
    except (Infeasible, Unrealizable, ReferenceNotFound):
        pass
    return _dewn_core(query, g, provider, rng, grid, plain_opts, DewnDetails())
