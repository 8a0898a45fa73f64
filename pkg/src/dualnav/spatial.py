"""Spatial queries over points of interest: k-nearest and range retrieval
with Euclidean filtering."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .dewn import DewnDetails, DewnOptions, dewn
from .exact import DROPQuery
from .geometry import dist
from .mil import MILProvider, MILRange
from .paths import Infeasible, RWPath
from .search import ReferenceNotFound
from .worlds import LocoState, PhysicalGrid, VirtualGraph


@dataclass(frozen=True)
class DkNNQuery:
    st_s: LocoState
    k: int
    budget: float
    pois: tuple[str, ...] = ()  # candidate POI node names; empty = all POIs
    epsilon: float = 0.1


@dataclass(frozen=True)
class DRQuery:
    st_s: LocoState
    radius: float
    budget: float
    pois: tuple[str, ...] = ()
    epsilon: float = 0.1


class FewerThanK(Exception):
    """Fewer than k POIs admit a budget-feasible route; carries the partial
    result list."""

    def __init__(self, results):
        super().__init__(f"only {len(results)} feasible POIs")
        self.results = results


@dataclass
class SpatialEngine:
    """Shared solver context plus a per-(state, POI, budget) result cache."""

    graph: VirtualGraph
    provider: MILProvider
    rng: MILRange
    grid: PhysicalGrid | None = None
    options: DewnOptions = field(default_factory=DewnOptions)
    cache: dict[tuple, RWPath | None] = field(default_factory=dict)

    def solve(
        self, st_s: LocoState, poi: str, budget: float, epsilon: float,
        length_bound: float | None = None,
    ) -> RWPath | None:
        key = (st_s.key(), poi, round(budget, 12))
        if key in self.cache:
            return self.cache[key]
        q = DROPQuery(
            st_s=st_s, target=self.graph.nodes[poi], budget=budget, epsilon=epsilon
        )
        try:
            path = dewn(
                q,
                self.graph,
                self.provider,
                self.rng,
                self.grid,
                self.options,
                initial_length_bound=length_bound,
            )
        except (Infeasible, ReferenceNotFound):
            path = None
        self.cache[key] = path
        return path


def _candidate_pois(engine: SpatialEngine, names: tuple[str, ...]) -> list[str]:
    if names:
        return list(names)
    return [n for n in engine.graph.nodes if not n.startswith("c")]


def dknn(q: DkNNQuery, engine: SpatialEngine) -> list[tuple[str, RWPath]]:
    """k nearest POIs by feasible route length, via incremental Euclidean
    filtering: POIs are examined in Euclidean order, stopping once the next
    Euclidean distance exceeds the k-th best route length."""
    pois = _candidate_pois(engine, q.pois)
    heap = [
        (dist(q.st_s.v_loc, engine.graph.nodes[p]), p) for p in pois
    ]
    heapq.heapify(heap)
    results: list[tuple[float, str, RWPath]] = []
    while heap:
        ed, poi = heapq.heappop(heap)
        if len(results) >= q.k and ed > results[q.k - 1][0] + 1e-12:
            break
        bound = results[q.k - 1][0] if len(results) >= q.k else None
        path = engine.solve(q.st_s, poi, q.budget, q.epsilon, length_bound=bound)
        if path is not None:
            results.append((path.length, poi, path))
            results.sort(key=lambda r: (r[0], r[1]))
    results.sort(key=lambda r: (r[0], r[1]))
    top = [(poi, path) for _, poi, path in results[: q.k]]
    if len(top) < q.k:
        raise FewerThanK(top)
    return top


def drange(q: DRQuery, engine: SpatialEngine) -> list[tuple[str, RWPath]]:
    """All POIs reachable by a budget-feasible route of length at most the
    radius; POIs beyond the radius in Euclidean distance are skipped."""
    out: list[tuple[float, str, RWPath]] = []
    for poi in _candidate_pois(engine, q.pois):
        if dist(q.st_s.v_loc, engine.graph.nodes[poi]) > q.radius + 1e-12:
            continue
        path = engine.solve(q.st_s, poi, q.budget, q.epsilon)
        if path is not None and path.length <= q.radius + 1e-12:
            out.append((path.length, poi, path))
    out.sort(key=lambda r: (r[0], r[1]))
    return [(poi, path) for _, poi, path in out]
