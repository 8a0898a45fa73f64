"""Instance generators, scenario execution, and report aggregation."""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field

from .baselines import cola_estimated, ksp_reset, mcp
from .dewn import DewnOptions, dewn
from .exact import DROPQuery, basic_dp
from .kinematics import CostModel, Worlds
from .mil import KinematicMILProvider, MILProvider, MILRange, build_mil_range
from .paths import Infeasible, RWPath
from .search import ReferenceNotFound
from .worlds import (
    LocoState,
    OrientationSet,
    PhysicalGrid,
    VirtualGraph,
    VirtualWorld,
    world_from_json,
)


class InvalidRatio(Exception):
    """Requested open-space ratio is outside (0, 1)."""


@dataclass
class GeneratedWorld:
    """A generated instance: both worlds plus the ready-made v-graph."""

    world: VirtualWorld
    grid: PhysicalGrid
    graph: VirtualGraph
    pitch: float = 1.0


def _default_room(size_m: float = 4.0, cell: float = 0.5) -> PhysicalGrid:
    n = int(round(size_m / cell))
    rows = []
    for r in range(n):
        if r == 0 or r == n - 1:
            rows.append("#" * n)
        else:
            rows.append("#" + "." * (n - 2) + "#")
    return PhysicalGrid.from_rows(rows, cell_size=cell)


def generate_maze(
    width: int, height: int, seed: int, pitch: float = 2.0,
    room: PhysicalGrid | None = None,
) -> GeneratedWorld:
    """Perfect maze: a uniform spanning tree of corridors over width x height
    cells.  Every cell center is a graph node; corridor walls become thin
    obstacle rectangles.  The physical room is independent of the maze."""
    if width < 3 or height < 3:
        raise ValueError("maze dimensions must be at least 3x3")
    rnd = random.Random(seed)
    cells = [(x, y) for x in range(width) for y in range(height)]
    # randomized depth-first spanning tree
    start = rnd.choice(cells)
    visited = {start}
    stack = [start]
    passages: set[frozenset] = set()
    while stack:
        x, y = stack[-1]
        nbrs = [
            (x + dx, y + dy)
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
            if 0 <= x + dx < width and 0 <= y + dy < height
            and (x + dx, y + dy) not in visited
        ]
        if not nbrs:
            stack.pop()
            continue
        nxt = rnd.choice(nbrs)
        passages.add(frozenset(((x, y), nxt)))
        visited.add(nxt)
        stack.append(nxt)

    g = VirtualGraph()
    for x, y in cells:
        g.add_node(f"m{x}_{y}", ((x + 0.5) * pitch, (y + 0.5) * pitch))
    for pas in passages:
        (ax, ay), (bx, by) = sorted(pas)
        g.add_edge(f"m{ax}_{ay}", f"m{bx}_{by}", pitch)

    # walls: a thin rectangle wherever two adjacent cells lack a passage
    t = pitch * 0.05
    obstacles = []
    for x, y in cells:
        for dx, dy in ((1, 0), (0, 1)):
            nx, ny = x + dx, y + dy
            edge_open = frozenset(((x, y), (nx, ny))) in passages
            if nx < width and ny < height and not edge_open:
                if dx:  # vertical wall between (x,y) and (x+1,y)
                    cx = (x + 1) * pitch
                    obstacles.append(
                        (
                            (cx - t, y * pitch),
                            (cx + t, y * pitch),
                            (cx + t, (y + 1) * pitch),
                            (cx - t, (y + 1) * pitch),
                        )
                    )
                else:  # horizontal wall
                    cy = (y + 1) * pitch
                    obstacles.append(
                        (
                            (x * pitch, cy - t),
                            ((x + 1) * pitch, cy - t),
                            ((x + 1) * pitch, cy + t),
                            (x * pitch, cy + t),
                        )
                    )
    world = VirtualWorld(
        bounds=(0.0, 0.0, width * pitch, height * pitch),
        obstacles=tuple(obstacles),
        pois=tuple((n, g.nodes[n]) for n in g.nodes),
    )
    return GeneratedWorld(
        world=world, grid=room or _default_room(), graph=g, pitch=pitch
    )


def generate_synthetic_city(
    n_pois: int, open_ratio: float, seed: int, size: float = 50.0,
    room: PhysicalGrid | None = None,
) -> GeneratedWorld:
    """Random rectangular-block world with the requested free-area ratio
    (within two percent), plus uniformly sampled free-space POIs."""
    if not (0.0 < open_ratio < 1.0):
        raise InvalidRatio(f"open_ratio must be in (0, 1), got {open_ratio}")
    rnd = random.Random(seed)
    total = size * size
    target_blocked = (1.0 - open_ratio) * total
    blocked = 0.0
    obstacles: list[tuple] = []
    attempts = 0
    while blocked < target_blocked - 0.01 * total and attempts < 10_000:
        attempts += 1
        want = target_blocked - blocked
        w = min(rnd.uniform(1.0, size / 4.0), math.sqrt(want) * 2.0)
        h = min(rnd.uniform(1.0, size / 4.0), max(want / w, 0.5))
        x = rnd.uniform(0.0, size - w)
        y = rnd.uniform(0.0, size - h)
        rect = ((x, y), (x + w, y), (x + w, y + h), (x, y + h))
        if any(_rects_overlap(rect, ob) for ob in obstacles):
            continue
        obstacles.append(rect)
        blocked += w * h
    world = VirtualWorld(bounds=(0.0, 0.0, size, size), obstacles=tuple(obstacles))
    pois = []
    while len(pois) < n_pois:
        p = (rnd.uniform(0.0, size), rnd.uniform(0.0, size))
        if world.point_free(p):
            pois.append((f"p{len(pois)}", p))
    world = VirtualWorld(bounds=world.bounds, obstacles=world.obstacles, pois=tuple(pois))
    from .worlds import build_visibility_graph

    graph = build_visibility_graph(world, length_cutoff=size / 2.0)
    return GeneratedWorld(world=world, grid=room or _default_room(), graph=graph)


def measured_open_ratio(world: VirtualWorld) -> float:
    xmin, ymin, xmax, ymax = world.bounds
    total = (xmax - xmin) * (ymax - ymin)
    blocked = sum(_polygon_area(ob) for ob in world.obstacles)
    return 1.0 - blocked / total


def _polygon_area(poly) -> float:
    s = 0.0
    for (x0, y0), (x1, y1) in zip(poly, list(poly[1:]) + [poly[0]]):
        s += x0 * y1 - x1 * y0
    return abs(s) / 2.0


def _rects_overlap(a, b) -> bool:
    ax0, ay0 = a[0]
    ax1, ay1 = a[2]
    bx0, by0 = b[0]
    bx1, by1 = b[2]
    return not (ax1 <= bx0 or bx1 <= ax0 or ay1 <= by0 or by1 <= ay0)


# ---------------------------------------------------------------------------
# Scenario execution
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    """A reproducible batch: shared solver context plus a query list."""

    name: str
    graph: VirtualGraph
    provider: MILProvider
    rng: MILRange
    queries: list[DROPQuery]
    algorithms: list[str]
    grid: PhysicalGrid | None = None
    orientations: OrientationSet = field(default_factory=OrientationSet)
    model: CostModel = field(default_factory=CostModel)
    options: DewnOptions = field(default_factory=DewnOptions)
    seed: int = 0
    k: int = 5


@dataclass
class RunRow:
    algorithm: str
    query_id: int
    feasible: bool
    length: float
    cost: float
    seconds: float
    error: str = ""


@dataclass
class RunReport:
    rows: list[RunRow] = field(default_factory=list)

    def aggregates(self) -> dict[str, dict[str, float]]:
        """Per-algorithm feasibility ratio and means; mean length and cost
        are taken over feasible rows only."""
        out: dict[str, dict[str, float]] = {}
        algos = sorted({r.algorithm for r in self.rows})
        for a in algos:
            rows = [r for r in self.rows if r.algorithm == a]
            feas = [r for r in rows if r.feasible]
            out[a] = {
                "n": len(rows),
                "feasibility": len(feas) / len(rows) if rows else 0.0,
                "mean_length": (
                    sum(r.length for r in feas) / len(feas) if feas else math.nan
                ),
                "mean_cost": (
                    sum(r.cost for r in feas) / len(feas) if feas else math.nan
                ),
                "mean_seconds": (
                    sum(r.seconds for r in rows) / len(rows) if rows else math.nan
                ),
            }
        return out

    def to_csv(self) -> str:
        lines = ["algorithm,query_id,feasible,length,cost,seconds"]
        for r in self.rows:
            lines.append(
                f"{r.algorithm},{r.query_id},{int(r.feasible)},"
                f"{r.length:.6f},{r.cost:.6f},{r.seconds:.6f}"
            )
        return "\n".join(lines) + "\n"

    def aggregates_csv(self) -> str:
        agg = self.aggregates()
        lines = ["algorithm,n,feasibility,mean_length,mean_cost,mean_seconds"]
        for a, m in agg.items():
            lines.append(
                f"{a},{int(m['n'])},{m['feasibility']:.4f},{m['mean_length']:.6f},"
                f"{m['mean_cost']:.6f},{m['mean_seconds']:.6f}"
            )
        return "\n".join(lines) + "\n"


def _run_one(scn: Scenario, algo: str, q: DROPQuery) -> RWPath:
    if algo == "basic_dp":
        return basic_dp(q, scn.graph, scn.provider)
    if algo == "dewn":
        return dewn(q, scn.graph, scn.provider, scn.rng, scn.grid, scn.options)
    if algo == "sdewn":
        opts = DewnOptions(
            epsilon=scn.options.epsilon, delta=scn.options.delta, reference_only=True
        )
        return dewn(q, scn.graph, scn.provider, scn.rng, scn.grid, opts)
    if algo == "mcp":
        return mcp(q, scn.graph, scn.provider)
    if algo == "ksp_reset":
        return ksp_reset(q, scn.graph, scn.grid, scn.orientations, scn.model, scn.k)
    if algo == "cola":
        return cola_estimated(q, scn.graph, scn.provider, scn.rng, scn.grid)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_matrix(scn: Scenario) -> RunReport:
    """Execute every (algorithm, query) pair; failures are recorded as
    infeasible rows and never abort the matrix."""
    report = RunReport()
    for qid, q in enumerate(scn.queries):
        for algo in scn.algorithms:
            t0 = time.perf_counter()
            try:
                path = _run_one(scn, algo, q)
                dt = time.perf_counter() - t0
                report.rows.append(
                    RunRow(algo, qid, True, path.length, path.cost, dt)
                )
            except (Infeasible, ReferenceNotFound) as exc:
                dt = time.perf_counter() - t0
                report.rows.append(
                    RunRow(algo, qid, False, math.nan, math.nan, dt, str(exc))
                )
            except Exception as exc:  # record, never abort
                dt = time.perf_counter() - t0
                report.rows.append(
                    RunRow(algo, qid, False, math.nan, math.nan, dt, f"error: {exc}")
                )
    return report


def kinematic_scenario(
    gen: GeneratedWorld,
    queries: list[DROPQuery],
    algorithms: list[str],
    model: CostModel | None = None,
    orientations: OrientationSet | None = None,
    name: str = "scenario",
    seed: int = 0,
    options: DewnOptions | None = None,
    states_by_node: dict | None = None,
) -> Scenario:
    """Wire a generated world into a runnable scenario with a kinematic
    transition catalog and its precomputed range table."""
    model = model or CostModel(kind="DetectionThreshold")
    orientations = orientations or OrientationSet(k=8)
    worlds = Worlds(virtual=gen.world, physical=gen.grid, orientations=orientations)
    provider = KinematicMILProvider(worlds, model, gen.graph)
    if states_by_node is None:
        states_by_node = _sample_states(gen, orientations, seed)
    rng = build_mil_range(gen.graph, provider, states_by_node)
    return Scenario(
        name=name,
        graph=gen.graph,
        provider=provider,
        rng=rng,
        queries=queries,
        algorithms=algorithms,
        grid=gen.grid,
        orientations=orientations,
        model=model,
        options=options or DewnOptions(),
        seed=seed,
    )


def _sample_states(
    gen: GeneratedWorld, orientations: OrientationSet, seed: int, per_node: int = 2
) -> dict[str, list[LocoState]]:
    """A small deterministic sample of loco-states per node, used to seed
    the range-table scan."""
    rnd = random.Random(seed)
    grid = gen.grid
    free_centers = []
    ox, oy = grid.origin
    for r in range(grid.n_rows):
        for c in range(grid.n_cols):
            if not grid.cells[r][c]:
                free_centers.append(
                    (ox + (c + 0.5) * grid.cell_size, oy + (r + 0.5) * grid.cell_size)
                )
    out: dict[str, list[LocoState]] = {}
    for name, loc in gen.graph.nodes.items():
        sts = []
        for _ in range(per_node):
            p = rnd.choice(free_centers)
            h = rnd.choice(orientations.angles)
            sts.append(LocoState(loc, h, p, h))
        out[name] = sts
    return out
