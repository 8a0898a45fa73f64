"""Rounded-and-scaled dynamic program over a trimmed loco-state space."""

from __future__ import annotations

import heapq
import itertools
import math

from .mil import MILProvider
from .paths import Infeasible, OperationSequence, RWPath
from .worlds import LocoState, VirtualGraph


def rounded_dp(
    X: list[LocoState],
    query,
    g: VirtualGraph,
    provider: MILProvider,
    L_lower: float,
    L_upper: float,
    epsilon: float,
) -> RWPath:
    """Length-quantized DP restricted to the surviving loco-states.

    Edge lengths are rounded up to multiples of S = epsilon * L_lower / |X|,
    so accumulated lengths live on an integer lattice of at most
    ceil(L_upper / S) + |X| steps.  The returned path reports its true,
    unrounded length.
    """
    if not X:
        raise Infeasible("empty trimmed space")
    allowed = {st.key() for st in X}
    skey = query.st_s.key()
    allowed.add(skey)
    src = g.node_at(query.st_s.v_loc)
    tgt = g.node_at(query.target)
    S = epsilon * L_lower / len(X)
    if S <= 0.0 or not math.isfinite(S):
        raise Infeasible("degenerate scale")
    kmax = math.ceil(L_upper / S) + len(X)

    if src == tgt:
        return RWPath(states=[query.st_s], length=0.0, cost=0.0)

    # label per (state key, rounded step count): (cost, true length)
    best: dict[tuple, tuple[float, float]] = {(skey, 0): (0.0, 0.0)}
    pred: dict[tuple, tuple] = {}
    state_of = {(skey, 0): query.st_s}
    node_of = {(skey, 0): src}
    counter = itertools.count()
    pq = [(0, 0.0, next(counter), (skey, 0))]
    settled: set[tuple] = set()
    dest: list[tuple] = []
    dest_k = None

    while pq:
        k, c, _, key = heapq.heappop(pq)
        if dest_k is not None and k > dest_k:
            break
        if key in settled or c > best.get(key, (math.inf,))[0] + 1e-12:
            continue
        settled.add(key)
        st = state_of[key]
        u = node_of[key]
        if u == tgt and c <= query.budget + 1e-12:
            if dest_k is None:
                dest_k = k
            dest.append((c, st.key(), key))
            continue
        true_l = best[key][1]
        for v, el in g.neighbors(u).items():
            dk = math.ceil(el / S - 1e-12)
            nk = k + dk
            if nk > kmax:
                continue
            for st2, tc, seq in provider.successors(st, g.nodes[v]):
                if st2.key() not in allowed:
                    continue
                nc = c + tc
                if nc > query.budget + 1e-12:
                    continue
                k2 = (st2.key(), nk)
                if nc < best.get(k2, (math.inf,))[0] - 1e-12:
                    best[k2] = (nc, true_l + el)
                    pred[k2] = (key, seq)
                    state_of[k2] = st2
                    node_of[k2] = v
                    heapq.heappush(pq, (nk, nc, next(counter), k2))

    if not dest:
        raise Infeasible("no destination state within budget")
    dest.sort()
    _, _, key = dest[0]
    cost, true_len = best[key]
    states = [state_of[key]]
    ops: list[OperationSequence] = []
    while key in pred:
        key, seq = pred[key]
        states.append(state_of[key])
        ops.append(seq)
    states.reverse()
    ops.reverse()
    return RWPath(states=states, length=true_len, cost=cost, ops=ops)
