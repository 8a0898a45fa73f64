"""Shared test fixtures: the hand-coded demo instance and random
table-backed instances."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import pytest

from dualnav import (
    CostModel,
    DROPQuery,
    GeneratedWorld,
    KinematicMILProvider,
    LocoState,
    MILRange,
    OrientationSet,
    PhysicalGrid,
    TableMILProvider,
    VirtualGraph,
    Worlds,
    bin_length,
    build_mil_range,
    generate_maze,
    greedy_realize,
)
from dualnav.harness import _sample_states

# ---------------------------------------------------------------------------
# Hand-coded demo instance (start S at (2,8), destination T at (10,2)).
# Two main corridors ("blue1" via A-B-D, "blue2" via F-G2-H), a long detour
# via E, a cheap-bound chain via W, and a side chain via Z that lowers the
# lower-bound cost of reaching B.
# ---------------------------------------------------------------------------

DEMO_NODES = {
    "S": (2.0, 8.0),
    "A": (6.0, 8.0),
    "B": (12.0, 6.0),
    "D": (12.0, 5.0),
    "T": (10.0, 2.0),
    "F": (3.0, 6.0),
    "G2": (4.0, 4.0),
    "H": (6.0, 3.0),
    "E": (6.0, 6.0),
    "W1": (8.0, 8.0),
    "W2": (8.0, 6.0),
    "W3": (8.0, 4.0),
    "Z1": (2.0, 10.0),
    "Z2": (4.0, 10.0),
    "Z3": (6.0, 10.0),
    "Z4": (8.2, 10.0),
}

DEMO_EDGES = [
    ("S", "A", 4.0),
    ("A", "B", 6.32),
    ("B", "D", 1.0),
    ("D", "T", 3.61),
    ("S", "F", 2.2),
    ("F", "G2", 2.2),
    ("G2", "H", 2.2),
    ("H", "T", 4.1),
    ("S", "E", 8.1),
    ("E", "T", 8.1),
    ("A", "W1", 2.0),
    ("W1", "W2", 2.0),
    ("W2", "W3", 2.0),
    ("W3", "T", 2.2),
    ("S", "Z1", 2.0),
    ("Z1", "Z2", 2.0),
    ("Z2", "Z3", 2.0),
    ("Z3", "Z4", 2.2),
    ("Z4", "B", 2.2),
]

# Published per-length cost-bound table used by the demo instance.
DEMO_RANGE_BINS = {
    1.0: (0.0, 1.0),
    1.4: (0.0, 2.0),
    2.0: (0.0, 3.0),
    2.2: (1.0, 3.0),
    3.0: (2.0, 3.0),
    3.6: (2.0, 3.0),
    4.0: (2.0, 3.0),
    4.1: (2.0, 3.0),
    5.0: (2.0, 4.0),
    5.1: (2.0, 4.0),
    6.0: (3.0, 4.0),
    6.3: (3.0, 4.0),
    8.1: (4.0, 7.0),
}

ST_S = LocoState((2.0, 8.0), 270.0, (2.0, 4.0), 270.0)
B2 = LocoState((6.0, 8.0), 0.0, (6.0, 6.0), 30.0)
B3 = LocoState((12.0, 6.0), 330.0, (10.0, 6.0), 0.0)
B4 = LocoState((12.0, 5.0), 270.0, (11.0, 5.0), 315.0)
B5 = LocoState((10.0, 2.0), 225.0, (10.0, 2.0), 240.0)
F_A = LocoState((3.0, 6.0), 315.0, (1.0, 2.0), 270.0)
G_A = LocoState((4.0, 4.0), 315.0, (2.0, 1.0), 315.0)
F_B = LocoState((3.0, 6.0), 315.0, (3.0, 2.0), 315.0)
G_B = LocoState((4.0, 4.0), 315.0, (4.0, 1.0), 315.0)
F_C1 = LocoState((3.0, 6.0), 315.0, (5.0, 2.0), 0.0)
G_C1 = LocoState((4.0, 4.0), 315.0, (6.0, 1.0), 0.0)
F_C2 = LocoState((3.0, 6.0), 315.0, (7.0, 2.0), 45.0)
G_C2 = LocoState((4.0, 4.0), 315.0, (8.0, 1.0), 45.0)
ST_H = LocoState((6.0, 3.0), 53.0, (6.0, 4.0), 53.0)
ST_T2 = LocoState((10.0, 2.0), 345.0, (9.0, 5.0), 10.0)
E1 = LocoState((6.0, 6.0), 90.0, (5.0, 5.0), 90.0)
ST_T3 = LocoState((10.0, 2.0), 180.0, (3.0, 3.0), 180.0)

DEMO_MIL_RECORDS = [
    (ST_S, B2, 0.17),
    (B2, B3, 1.0),
    (B3, B4, 1.18),
    (B4, B5, 1.0),
    (ST_S, F_A, 3.0),
    (F_A, G_A, 1.0),
    (G_A, ST_H, 1.0),
    (ST_S, F_B, 0.0),
    (F_B, G_B, 1.8),
    (G_B, ST_H, 1.8),
    (ST_S, F_C1, 0.4),
    (F_C1, G_C1, 0.4),
    (G_C1, F_C2, 0.4),
    (F_C2, G_C2, 0.4),
    (G_C2, ST_H, 0.4),
    (ST_H, ST_T2, 1.4),
    (ST_S, E1, 2.0),
    (E1, ST_T3, 6.0),
]


@dataclass
class DemoInstance:
    graph: VirtualGraph
    provider: TableMILProvider
    rng: MILRange
    grid: PhysicalGrid
    st_s: LocoState

    def query(self, budget: float, epsilon: float = 0.1) -> DROPQuery:
        return DROPQuery(
            st_s=self.st_s, target=(10.0, 2.0), budget=budget, epsilon=epsilon
        )


def make_demo() -> DemoInstance:
    g = VirtualGraph()
    for n, p in DEMO_NODES.items():
        g.add_node(n, p)
    for u, v, l in DEMO_EDGES:
        g.add_edge(u, v, l)
    provider = TableMILProvider(DEMO_MIL_RECORDS)
    rng = MILRange(quantum=0.1, bins=dict(DEMO_RANGE_BINS))
    rows = ["#" * 14] + ["#" + "." * 12 + "#" for _ in range(8)] + ["#" * 14]
    grid = PhysicalGrid.from_rows(rows, cell_size=1.0)
    return DemoInstance(graph=g, provider=provider, rng=rng, grid=grid, st_s=ST_S)


@pytest.fixture
def demo() -> DemoInstance:
    return make_demo()


# ---------------------------------------------------------------------------
# Random table-backed instances
# ---------------------------------------------------------------------------

@dataclass
class RandomInstance:
    graph: VirtualGraph
    provider: TableMILProvider
    rng: MILRange
    st_s: LocoState
    target: tuple[float, float]
    states_by_node: dict[str, list[LocoState]]
    src: str
    tgt: str

    def query(self, budget: float, epsilon: float = 0.1) -> DROPQuery:
        return DROPQuery(
            st_s=self.st_s, target=self.target, budget=budget, epsilon=epsilon
        )

    def n_states(self) -> int:
        return sum(len(v) for v in self.states_by_node.values())


def make_random_instance(
    seed: int,
    n_nodes: int = 7,
    states_per_node: int = 2,
    extra_edges: int = 3,
    max_cost: float = 4.0,
) -> RandomInstance:
    """Connected random v-graph with an explicit transition-cost table.

    Every directed edge admits a transition from each source state to at
    least one target state, so realization never dead-ends; the range table
    is built from the same table, keeping its bounds genuine.
    """
    rnd = random.Random(seed)
    g = VirtualGraph()
    pts = []
    while len(pts) < n_nodes:
        p = (round(rnd.uniform(0.0, 20.0), 2), round(rnd.uniform(0.0, 20.0), 2))
        if all(math.dist(p, q) > 1.0 for q in pts):
            pts.append(p)
    for i, p in enumerate(pts):
        g.add_node(f"n{i}", p)
    order = list(range(n_nodes))
    rnd.shuffle(order)
    edges = set()
    for a, b in zip(order, order[1:]):
        edges.add(frozenset((a, b)))
    tries = 0
    while len(edges) < n_nodes - 1 + extra_edges and tries < 100:
        tries += 1
        a, b = rnd.sample(range(n_nodes), 2)
        edges.add(frozenset((a, b)))
    for e in edges:
        a, b = sorted(e)
        g.add_edge(f"n{a}", f"n{b}")

    headings = [0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0]
    states_by_node: dict[str, list[LocoState]] = {}
    for i in range(n_nodes):
        name = f"n{i}"
        sts = []
        for j in range(states_per_node):
            sts.append(
                LocoState(
                    g.nodes[name],
                    rnd.choice(headings),
                    (float(j), float(i % 5)),
                    rnd.choice(headings),
                )
            )
        states_by_node[name] = sts

    records = []
    for e in edges:
        a, b = sorted(e)
        for u, v in ((f"n{a}", f"n{b}"), (f"n{b}", f"n{a}")):
            for st1 in states_by_node[u]:
                targets = [
                    st2
                    for st2 in states_by_node[v]
                    if rnd.random() < 0.7
                ]
                if not targets:
                    targets = [rnd.choice(states_by_node[v])]
                for st2 in targets:
                    records.append((st1, st2, round(rnd.uniform(0.0, max_cost), 2)))
    provider = TableMILProvider(records)
    rng = build_mil_range(g, provider, states_by_node)

    src, tgt = rnd.sample([f"n{i}" for i in range(n_nodes)], 2)
    st_s = states_by_node[src][0]
    return RandomInstance(
        graph=g,
        provider=provider,
        rng=rng,
        st_s=st_s,
        target=g.nodes[tgt],
        states_by_node=states_by_node,
        src=src,
        tgt=tgt,
    )


# ---------------------------------------------------------------------------
# Shared maze benchmark suite (kinematic catalog, room-constrained physical
# space); budget calibrated from the greedy realization of each query's
# shortest v-path so that every solver has a fair shot.
# ---------------------------------------------------------------------------

def square_room(size_m: float, cell: float) -> PhysicalGrid:
    n = int(round(size_m / cell))
    rows = [
        "#" * n if r in (0, n - 1) else "#" + "." * (n - 2) + "#"
        for r in range(n)
    ]
    return PhysicalGrid.from_rows(rows, cell_size=cell)


@dataclass
class MazeSuite:
    gen: GeneratedWorld
    model: CostModel
    orientations: OrientationSet
    provider: KinematicMILProvider
    rng: MILRange
    pairs: list  # (src, tgt, shortest_path_nodes, shortest_length)
    queries: list
    budget: float

    def provider_for(self, model: CostModel) -> KinematicMILProvider:
        worlds = Worlds(
            virtual=self.gen.world,
            physical=self.gen.grid,
            orientations=self.orientations,
        )
        return KinematicMILProvider(worlds, model, self.gen.graph)

    def range_for(self, provider: KinematicMILProvider) -> MILRange:
        states = _sample_states(self.gen, self.orientations, seed=0)
        return build_mil_range(self.gen.graph, provider, states)


def make_maze_suite(
    width: int = 25,
    height: int = 25,
    seed: int = 7,
    n_queries: int = 8,
    reset_cost: float = 1.0,
) -> MazeSuite:
    gen = generate_maze(width, height, seed, room=square_room(6.0, 1.0))
    model = CostModel(kind="DetectionThreshold", reset_cost=reset_cost)
    orientations = OrientationSet(k=4)
    worlds = Worlds(virtual=gen.world, physical=gen.grid, orientations=orientations)
    provider = KinematicMILProvider(worlds, model, gen.graph)
    rng = build_mil_range(
        gen.graph, provider, _sample_states(gen, orientations, seed=0)
    )
    rnd = random.Random(3)
    nodes = sorted(gen.graph.nodes)
    pairs = []
    while len(pairs) < n_queries:
        src, tgt = rnd.sample(nodes, 2)
        sp = gen.graph.shortest_path(src, tgt)
        if sp and 60.0 <= sp[1] <= 220.0:
            pairs.append((src, tgt, sp[0], sp[1]))
    start = lambda src: LocoState(gen.graph.nodes[src], 0.0, (2.5, 2.5), 0.0)
    budget = max(
        greedy_realize(path, start(src), gen.graph, provider, gen.grid).cost
        for src, tgt, path, _ in pairs
    )
    queries = [
        DROPQuery(st_s=start(src), target=gen.graph.nodes[tgt], budget=budget)
        for src, tgt, _, _ in pairs
    ]
    return MazeSuite(
        gen=gen,
        model=model,
        orientations=orientations,
        provider=provider,
        rng=rng,
        pairs=pairs,
        queries=queries,
        budget=budget,
    )


@pytest.fixture(scope="session")
def maze_suite() -> MazeSuite:
    return make_maze_suite()
