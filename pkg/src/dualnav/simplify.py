"""Secant-style multiplier search on the cost-simplified v-graph."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .geometry import EPS
from .mil import MILRange, bin_length
from .worlds import VirtualGraph

SHORTEST_FEASIBLE = "ShortestFeasible"
INFEASIBLE = "Infeasible"
MULTIPLIERS = "Multipliers"


@dataclass
class MultiplierSearch:
    """Result of one bound-weighted multiplier search."""

    verdict: str
    r_star: float | None = None
    p: list[str] | None = None  # bound-feasible side
    q: list[str] | None = None  # bound-infeasible (shorter) side
    shortest: list[str] | None = None
    iterations: int = 0


@dataclass
class MultiplierResult:
    """Combined verdict for both bound weightings."""

    verdict: str
    r_alpha_star: float | None = None
    r_beta_star: float | None = None
    shortest: list[str] | None = None
    alpha: MultiplierSearch | None = None
    beta: MultiplierSearch | None = None


def _weighted_dijkstra(
    g: VirtualGraph,
    s: str,
    t: str,
    length_of,
    bound_of,
    r_len: float,
    r_bound: float,
) -> list[str] | None:
    """Shortest s-t path under weight r_len*length + r_bound*bound."""
    dist: dict[str, float] = {s: 0.0}
    pred: dict[str, str] = {}
    pq: list[tuple[float, str]] = [(0.0, s)]
    done: set[str] = set()
    while pq:
        d, u = heapq.heappop(pq)
        if u in done:
            continue
        done.add(u)
        if u == t:
            break
        for v, l in g.neighbors(u).items():
            w = r_len * length_of(l) + r_bound * bound_of(l)
            nd = d + w
            if nd < dist.get(v, math.inf) - EPS:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(pq, (nd, v))
    if t not in dist:
        return None
    path = [t]
    while path[-1] != s:
        path.append(pred[path[-1]])
    path.reverse()
    return path


def _path_sum(g: VirtualGraph, path: list[str], f) -> float:
    return sum(f(g.edge_length(u, v)) for u, v in zip(path, path[1:]))


def _search_one(
    g: VirtualGraph,
    s: str,
    t: str,
    rng: MILRange,
    C: float,
    bound_of,
    delta: float | None,
    check_infeasible: bool,
) -> MultiplierSearch:
    """Secant iteration for one bound weighting.

    Lengths are taken at bin resolution so the iterate matches what the
    bound table can distinguish.  The budget-exceeded verdict on the
    minimum-bound path is only sound for the lower-bound weighting, so it is
    gated by check_infeasible.
    """
    length_of = lambda l: bin_length(l, rng.quantum)

    shortest = _weighted_dijkstra(g, s, t, length_of, bound_of, 1.0, 0.0)
    if shortest is None:
        return MultiplierSearch(verdict=INFEASIBLE)
    if _path_sum(g, shortest, lambda l: rng.beta(l)) <= C + 1e-12:
        return MultiplierSearch(verdict=SHORTEST_FEASIBLE, shortest=shortest)

    p = _weighted_dijkstra(g, s, t, length_of, bound_of, 0.0, 1.0)
    if check_infeasible and _path_sum(g, p, bound_of) > C + 1e-12:
        return MultiplierSearch(verdict=INFEASIBLE, shortest=shortest)
    q = shortest
    r = 0.0
    it = 0
    while True:
        it += 1
        denom = _path_sum(g, p, bound_of) - _path_sum(g, q, bound_of)
        if abs(denom) <= 1e-12:
            break
        r_new = (_path_sum(g, q, length_of) - _path_sum(g, p, length_of)) / denom
        if delta is not None and it > 1 and abs(r_new - r) <= delta * max(1.0, abs(r)):
            r = r_new
            break
        r = r_new
        x = _weighted_dijkstra(g, s, t, length_of, bound_of, 1.0, r)
        if x == p or x == q:
            break
        if _path_sum(g, x, bound_of) <= C + 1e-12:
            p = x
        else:
            q = x
        if it > 200:
            break
    return MultiplierSearch(
        verdict=MULTIPLIERS, r_star=r, p=p, q=q, shortest=shortest, iterations=it
    )


def csms(
    g: VirtualGraph,
    s: str,
    t: str,
    rng: MILRange,
    C: float,
    delta: float | None = None,
) -> MultiplierResult:
    """Run the multiplier search for both the lower-bound (alpha) and
    upper-bound (beta) edge weightings.

    Verdicts: the plain shortest v-path being beta-feasible certifies an
    optimal shortcut; the minimum-alpha path exceeding the budget certifies
    infeasibility.  Otherwise both optimal multipliers are returned.
    """
    beta = _search_one(g, s, t, rng, C, lambda l: rng.beta(l), delta, False)
    if beta.verdict == SHORTEST_FEASIBLE:
        return MultiplierResult(verdict=SHORTEST_FEASIBLE, shortest=beta.shortest, beta=beta)
    alpha = _search_one(g, s, t, rng, C, lambda l: rng.alpha(l), delta, True)
    if alpha.verdict == INFEASIBLE:
        return MultiplierResult(verdict=INFEASIBLE, alpha=alpha, beta=beta)
    if beta.verdict == INFEASIBLE:
        # The graph is disconnected for the beta weighting; reuse the alpha
        # multiplier on both sides.
        beta = alpha
    return MultiplierResult(
        verdict=MULTIPLIERS,
        r_alpha_star=alpha.r_star,
        r_beta_star=beta.r_star,
        shortest=beta.shortest or alpha.shortest,
        alpha=alpha,
        beta=beta,
    )
