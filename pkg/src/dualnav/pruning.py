"""Pruned search-space construction: label-propagating exploration with
infeasibility, over-length, and lock-based pruning."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

from .mil import MILProvider
from .paths import OperationSequence
from .worlds import LocoState, VirtualGraph

ILSP = "ILSP"  # infeasible via lower-bound cost through the node
SLSP = "SLSP"  # provably longer than the incumbent bound
ULSL = "ULSL"  # label-based lock (may unlock on improvement)
VISITED = "visited"

TOL = 1e-9


@dataclass
class Labels:
    """Best-known (length, cost) label pairs for one loco-state: one pair
    from the minimum-length arrival, one from the minimum-cost arrival."""

    l_l: float = math.inf
    c_l: float = math.inf
    l_c: float = math.inf
    c_c: float = math.inf
    pred_l: tuple | None = None  # (pred key, OperationSequence, edge length, cost)
    pred_c: tuple | None = None


@dataclass
class PruneResult:
    X: list[LocoState]
    labels: dict[tuple, Labels]
    L_tilde: float
    verdicts: dict[tuple, str] = field(default_factory=dict)
    unlock_count: int = 0
    states: dict[tuple, LocoState] = field(default_factory=dict)

    def verdict_at(self, v_loc) -> set[str]:
        """Distinct verdicts over every known state at a virtual location."""
        out = set()
        for key, verdict in self.verdicts.items():
            st = self.states.get(key)
            if st is not None and abs(st.v_loc[0] - v_loc[0]) < 1e-6 and abs(
                st.v_loc[1] - v_loc[1]
            ) < 1e-6:
                out.add(verdict)
        return out


def ppnp_search(
    query,
    reference_length: float,
    g: VirtualGraph,
    provider: MILProvider,
    heur,
    disable_pruning: tuple[str, ...] = (),
) -> PruneResult:
    """Explore the loco-state space, keeping only states that can still lie
    on a budget-feasible path no longer than the incumbent bound.

    States are processed in insertion order; locked states sink behind every
    live entry and are only reconsidered when a label improves or, at the
    end, with exact labels.  The incumbent length bound tightens whenever a
    label pair certifies a shorter feasible completion.
    """
    src = g.node_at(query.st_s.v_loc)
    tgt = g.node_at(query.target)
    C = query.budget
    L_tilde = reference_length
    no_ilsp = ILSP in disable_pruning
    no_slsp = SLSP in disable_pruning
    no_ulsl = ULSL in disable_pruning

    labels: dict[tuple, Labels] = {}
    states: dict[tuple, LocoState] = {}
    node_of: dict[tuple, str] = {}
    verdicts: dict[tuple, str] = {}
    locked: dict[tuple, bool] = {}
    token: dict[tuple, int] = {}
    visited: dict[tuple, LocoState] = {}
    counter = itertools.count()
    unlock_count = 0
    pq: list = []

    def push(key: tuple, is_locked: bool) -> None:
        tok = next(counter)
        token[key] = tok
        locked[key] = is_locked
        heapq.heappush(pq, (1 if is_locked else 0, tok, key))

    skey = query.st_s.key()
    labels[skey] = Labels(l_l=0.0, c_l=0.0, l_c=0.0, c_c=0.0)
    states[skey] = query.st_s
    node_of[skey] = src
    push(skey, False)

    def maybe_tighten(key: tuple) -> None:
        nonlocal L_tilde
        n = node_of[key]
        lm = heur.lmin_to_t.get(n, math.inf)
        bm = heur.beta_to_t.get(n, math.inf)
        lab = labels[key]
        for l, c in ((lab.l_l, lab.c_l), (lab.l_c, lab.c_c)):
            if l + lm < L_tilde - TOL and c + bm <= C + 1e-12:
                L_tilde = l + lm

    def expand(key: tuple) -> None:
        nonlocal unlock_count
        st = states[key]
        lab = labels[key]
        u = node_of[key]
        children = []
        for v, el in g.neighbors(u).items():
            for st2, tc, seq in provider.successors(st, g.nodes[v]):
                children.append((st2, v, el, tc, seq))
        children.sort(key=lambda t: t[0].key())
        for st2, v, el, tc, seq in children:
            k2 = st2.key()
            if k2 not in labels:
                labels[k2] = Labels()
                states[k2] = st2
                node_of[k2] = v
            lab2 = labels[k2]
            improved = False
            nl, nc = lab.l_l + el, lab.c_l + tc
            if nl < lab2.l_l - TOL or (
                abs(nl - lab2.l_l) <= TOL and nc < lab2.c_l - TOL
            ):
                lab2.l_l, lab2.c_l = nl, nc
                lab2.pred_l = (key, seq, el, tc)
                improved = True
            ml, mc = lab.l_c + el, lab.c_c + tc
            if mc < lab2.c_c - TOL or (
                abs(mc - lab2.c_c) <= TOL and ml < lab2.l_c - TOL
            ):
                lab2.l_c, lab2.c_c = ml, mc
                lab2.pred_c = (key, seq, el, tc)
                improved = True
            if improved:
                maybe_tighten(k2)
                if locked.get(k2, False):
                    unlock_count += 1
                push(k2, False)

    ran_endgame = False
    while pq:
        flag, tok, key = heapq.heappop(pq)
        if token.get(key) != tok:
            continue
        if flag == 0 and locked.get(key, False):
            continue
        if flag == 1:
            # Only locked states remain: settle them with exact labels.
            if ran_endgame:
                break
            ran_endgame = True
            exact = _exact_labels(query, g, provider)
            progressed = False
            still_locked = [key] + [
                k for f, tk, k in pq if f == 1 and token.get(k) == tk
            ]
            for k in still_locked:
                ex = exact.get(k)
                if ex is not None:
                    lab = labels[k]
                    lab.l_l = min(lab.l_l, ex[0].l_l)
                    lab.c_l = min(lab.c_l, ex[0].c_l)
                    if ex[0].pred_l is not None:
                        lab.pred_l = ex[0].pred_l
                    lab.l_c = min(lab.l_c, ex[1].l_c)
                    lab.c_c = min(lab.c_c, ex[1].c_c)
                    if ex[1].pred_c is not None:
                        lab.pred_c = ex[1].pred_c
                n = node_of[k]
                lab = labels[k]
                lock_again = (
                    lab.c_c + heur.alpha_to_t.get(n, math.inf) > C + 1e-12
                    or lab.l_l + heur.lmin_to_t.get(n, math.inf) > L_tilde + TOL
                )
                if not lock_again:
                    unlock_count += 1
                    push(k, False)
                    progressed = True
            if not progressed:
                break
            continue
        n = node_of[key]
        if not no_ilsp and (
            heur.alpha_from_s.get(n, math.inf) + heur.alpha_to_t.get(n, math.inf)
            > C + 1e-12
        ):
            verdicts[key] = ILSP
            continue
        if not no_slsp and (
            heur.lmin_from_s.get(n, math.inf) + heur.lmin_to_t.get(n, math.inf)
            > L_tilde + TOL
        ):
            verdicts[key] = SLSP
            continue
        lab = labels[key]
        if not no_ulsl and (
            lab.c_c + heur.alpha_to_t.get(n, math.inf) > C + 1e-12
            or lab.l_l + heur.lmin_to_t.get(n, math.inf) > L_tilde + TOL
        ):
            verdicts[key] = ULSL
            push(key, True)
            continue
        verdicts[key] = VISITED
        visited[key] = states[key]
        expand(key)

    # Classify known states never touched by the queue so per-state pruning
    # verdicts are observable everywhere.
    for name in g.nodes:
        for st in provider.states_at(g.nodes[name]):
            k = st.key()
            if k in verdicts:
                continue
            states.setdefault(k, st)
            a = heur.alpha_from_s.get(name, math.inf) + heur.alpha_to_t.get(
                name, math.inf
            )
            l = heur.lmin_from_s.get(name, math.inf) + heur.lmin_to_t.get(
                name, math.inf
            )
            if not no_ilsp and a > C + 1e-12:
                verdicts[k] = ILSP
            elif not no_slsp and l > L_tilde + TOL:
                verdicts[k] = SLSP

    return PruneResult(
        X=list(visited.values()),
        labels=labels,
        L_tilde=L_tilde,
        verdicts=verdicts,
        unlock_count=unlock_count,
        states=states,
    )


def _exact_labels(query, g: VirtualGraph, provider: MILProvider):
    """Exact min-length and min-cost labels from the source over the full
    loco-state graph (two relaxations, no pruning)."""
    out: dict[tuple, tuple[Labels, Labels]] = {}

    def run(objective: str):
        skey = query.st_s.key()
        best: dict[tuple, tuple[float, float]] = {skey: (0.0, 0.0)}
        pred: dict[tuple, tuple] = {}
        states = {skey: query.st_s}
        node_of = {skey: g.node_at(query.st_s.v_loc)}
        counter = itertools.count()
        pq = [(0.0, 0.0, next(counter), skey)]
        done = set()
        while pq:
            p1, p2, _, key = heapq.heappop(pq)
            if key in done:
                continue
            done.add(key)
            st = states[key]
            l, c = best[key]
            for v, el in g.neighbors(node_of[key]).items():
                for st2, tc, seq in provider.successors(st, g.nodes[v]):
                    k2 = st2.key()
                    nl, nc = l + el, c + tc
                    np = (nl, nc) if objective == "length" else (nc, nl)
                    cur = best.get(k2)
                    curp = None
                    if cur is not None:
                        curp = (
                            (cur[0], cur[1]) if objective == "length" else (cur[1], cur[0])
                        )
                    if curp is None or np[0] < curp[0] - TOL or (
                        abs(np[0] - curp[0]) <= TOL and np[1] < curp[1] - TOL
                    ):
                        best[k2] = (nl, nc)
                        pred[k2] = (key, seq, el, tc)
                        states[k2] = st2
                        node_of[k2] = v
                        heapq.heappush(pq, (np[0], np[1], next(counter), k2))
        return best, pred

    len_best, len_pred = run("length")
    cost_best, cost_pred = run("cost")
    for k in set(len_best) | set(cost_best):
        ll = Labels()
        if k in len_best:
            ll.l_l, ll.c_l = len_best[k]
            ll.pred_l = len_pred.get(k)
        lc = Labels()
        if k in cost_best:
            lc.l_c, lc.c_c = cost_best[k]
            lc.pred_c = cost_pred.get(k)
        out[k] = (ll, lc)
    return out
