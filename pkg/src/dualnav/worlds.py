"""Dual-world model: virtual polygon world, physical occupancy grid, graphs."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

from .geometry import (
    EPS,
    Point,
    dist,
    point_strictly_in_polygon,
    segment_blocked_by_polygon,
    supercover_cells,
)


@dataclass(frozen=True)
class VirtualWorld:
    """Polygonal virtual environment: rectangular bounds, obstacles, POIs."""

    bounds: tuple[float, float, float, float]  # (xmin, ymin, xmax, ymax)
    obstacles: tuple[tuple[Point, ...], ...] = ()
    pois: tuple[tuple[str, Point], ...] = ()

    def contains(self, p: Point) -> bool:
        xmin, ymin, xmax, ymax = self.bounds
        return xmin - EPS <= p[0] <= xmax + EPS and ymin - EPS <= p[1] <= ymax + EPS

    def point_free(self, p: Point) -> bool:
        """True when p is inside bounds and not strictly inside any obstacle."""
        if not self.contains(p):
            return False
        return not any(point_strictly_in_polygon(p, ob) for ob in self.obstacles)

    def poi_point(self, name: str) -> Point:
        for n, p in self.pois:
            if n == name:
                return p
        raise KeyError(name)


def segment_clear_virtual(world: VirtualWorld, a: Point, b: Point) -> bool:
    """True when the open segment ab stays in virtual free space.

    Grazing an obstacle boundary or sharing a corner does not block.
    """
    if not (world.contains(a) and world.contains(b)):
        return False
    return not any(
        segment_blocked_by_polygon(a, b, ob) for ob in world.obstacles
    )


@dataclass(frozen=True)
class PhysicalGrid:
    """Occupancy grid for the physical room; True cells are obstacles."""

    cell_size: float
    cells: tuple[tuple[bool, ...], ...]  # cells[row][col], row 0 at y=origin
    origin: Point = (0.0, 0.0)

    @property
    def n_rows(self) -> int:
        return len(self.cells)

    @property
    def n_cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    def cell_blocked(self, col: int, row: int) -> bool:
        if not (0 <= row < self.n_rows and 0 <= col < self.n_cols):
            return True
        return self.cells[row][col]

    def point_free(self, p: Point) -> bool:
        x = p[0] - self.origin[0]
        y = p[1] - self.origin[1]
        col = int(math.floor(x / self.cell_size))
        row = int(math.floor(y / self.cell_size))
        return not self.cell_blocked(col, row)

    @classmethod
    def from_rows(
        cls, rows: list[str], cell_size: float = 0.3, origin: Point = (0.0, 0.0)
    ) -> "PhysicalGrid":
        """Build from strings, '#' = obstacle, '.' = free; rows[0] is the
        bottom row (smallest y)."""
        cells = tuple(tuple(ch == "#" for ch in r) for r in rows)
        return cls(cell_size=cell_size, cells=cells, origin=origin)

    def to_rows(self) -> list[str]:
        return ["".join("#" if b else "." for b in row) for row in self.cells]


def path_clear_physical(grid: PhysicalGrid, pts: list[Point]) -> bool:
    """True when the polyline pts stays inside free cells of the grid."""
    ox, oy = grid.origin
    shifted = [(p[0] - ox, p[1] - oy) for p in pts]
    for i in range(len(shifted) - 1):
        for col, row in supercover_cells(shifted[i], shifted[i + 1], grid.cell_size):
            if grid.cell_blocked(col, row):
                return False
    if len(shifted) == 1:
        for col, row in supercover_cells(shifted[0], shifted[0], grid.cell_size):
            if grid.cell_blocked(col, row):
                return False
    return True


@dataclass(frozen=True)
class OrientationSet:
    """Discrete heading lattice used for snapping, k evenly spaced angles."""

    k: int = 8

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(360.0 * i / self.k for i in range(self.k))

    def snap(self, theta: float) -> float:
        """Nearest lattice angle; ties broken counter-clockwise."""
        theta = theta % 360.0
        best = None
        best_d = None
        for a in self.angles:
            d = abs((theta - a + 180.0) % 360.0 - 180.0)
            if best_d is None or d < best_d - EPS:
                best, best_d = a, d
            elif abs(d - best_d) <= EPS:
                # counter-clockwise tie-break: prefer the angle ahead of theta
                if (a - theta) % 360.0 < (best - theta) % 360.0:
                    best = a
        return best


@dataclass(frozen=True, order=True)
class LocoState:
    """Joint virtual/physical pose: ((v_loc, v_heading), (p_loc, p_heading)).

    Headings are degrees, 0 = +x, counter-clockwise positive.
    """

    v_loc: Point
    v_heading: float
    p_loc: Point
    p_heading: float

    def key(self) -> tuple:
        k = getattr(self, "_key", None)
        if k is None:
            k = (self.v_loc, self.v_heading % 360.0, self.p_loc, self.p_heading % 360.0)
            object.__setattr__(self, "_key", k)
        return k


class VirtualGraph:
    """Undirected virtual graph over obstacle corners and POIs.

    Built from a world (edge iff the segment is clear and within the cutoff,
    length = Euclidean distance) or assembled directly with explicit edge
    lengths for synthetic instances.
    """

    def __init__(self) -> None:
        self.nodes: dict[str, Point] = {}
        self.adj: dict[str, dict[str, float]] = {}

    def add_node(self, name: str, loc: Point) -> None:
        self.nodes[name] = loc
        self.adj.setdefault(name, {})

    def add_edge(self, u: str, v: str, length: float | None = None) -> None:
        if length is None:
            length = dist(self.nodes[u], self.nodes[v])
        self.adj[u][v] = length
        self.adj[v][u] = length

    def edge_length(self, u: str, v: str) -> float:
        return self.adj[u][v]

    def neighbors(self, u: str) -> dict[str, float]:
        return self.adj[u]

    def node_at(self, loc: Point) -> str | None:
        for name, p in self.nodes.items():
            if dist(p, loc) < 1e-6:
                return name
        return None

    def dijkstra(
        self, source: str, weight: dict[tuple[str, str], float] | None = None
    ) -> tuple[dict[str, float], dict[str, str]]:
        """Single-source shortest paths; `weight` overrides edge lengths."""
        distv: dict[str, float] = {source: 0.0}
        pred: dict[str, str] = {}
        pq: list[tuple[float, str]] = [(0.0, source)]
        done: set[str] = set()
        while pq:
            d, u = heapq.heappop(pq)
            if u in done:
                continue
            done.add(u)
            for v, l in self.adj[u].items():
                w = weight[(u, v)] if weight is not None else l
                nd = d + w
                if nd < distv.get(v, math.inf) - EPS:
                    distv[v] = nd
                    pred[v] = u
                    heapq.heappush(pq, (nd, v))
        return distv, pred

    def shortest_path(self, s: str, t: str) -> tuple[list[str], float] | None:
        distv, pred = self.dijkstra(s)
        if t not in distv:
            return None
        path = [t]
        while path[-1] != s:
            path.append(pred[path[-1]])
        path.reverse()
        return path, distv[t]


def build_visibility_graph(
    world: VirtualWorld, length_cutoff: float = math.inf
) -> VirtualGraph:
    """Visibility graph over obstacle corners plus POIs.

    An edge joins two nodes when the open segment between them avoids every
    obstacle interior and its length is at most length_cutoff.
    """
    g = VirtualGraph()
    idx = 0
    for ob in world.obstacles:
        for corner in ob:
            name = f"c{idx}"
            idx += 1
            if world.point_free(corner) and g.node_at(corner) is None:
                g.add_node(name, corner)
    for name, p in world.pois:
        if g.node_at(p) is None:
            g.add_node(name, p)
    names = list(g.nodes)
    for i, u in enumerate(names):
        for v in names[i + 1 :]:
            a, b = g.nodes[u], g.nodes[v]
            d = dist(a, b)
            if d <= length_cutoff + EPS and segment_clear_virtual(world, a, b):
                g.add_edge(u, v, d)
    return g


def virtual_neighbors(g: VirtualGraph, node: str) -> list[tuple[str, float]]:
    """Adjacent virtual nodes with edge lengths, sorted by name."""
    return sorted(g.neighbors(node).items())


# ---------------------------------------------------------------------------
# JSON world format
# ---------------------------------------------------------------------------

def world_from_json(text: str) -> tuple[VirtualWorld, PhysicalGrid]:
    """Parse the documented world format.

    {"virtual": {"bounds": [xmin, ymin, xmax, ymax],
                 "obstacles": [[[x, y], ...], ...],
                 "pois": [{"name": ..., "x": ..., "y": ...}, ...]},
     "physical": {"cell_size": 0.3, "rows": ["..#..", ...]}}

    '#' marks an obstacle cell and '.' a free cell; rows[0] is the bottom row.
    """
    data = json.loads(text)
    v = data["virtual"]
    world = VirtualWorld(
        bounds=tuple(v["bounds"]),
        obstacles=tuple(
            tuple((float(x), float(y)) for x, y in ob) for ob in v.get("obstacles", [])
        ),
        pois=tuple(
            (p["name"], (float(p["x"]), float(p["y"]))) for p in v.get("pois", [])
        ),
    )
    ph = data["physical"]
    grid = PhysicalGrid.from_rows(
        ph["rows"],
        cell_size=float(ph.get("cell_size", 0.3)),
        origin=tuple(ph.get("origin", (0.0, 0.0))),
    )
    return world, grid


def world_to_json(world: VirtualWorld, grid: PhysicalGrid) -> str:
    data = {
        "virtual": {
            "bounds": list(world.bounds),
            "obstacles": [[list(p) for p in ob] for ob in world.obstacles],
            "pois": [{"name": n, "x": p[0], "y": p[1]} for n, p in world.pois],
        },
        "physical": {
            "cell_size": grid.cell_size,
            "origin": list(grid.origin),
            "rows": grid.to_rows(),
        },
    }
    return json.dumps(data, indent=2)
