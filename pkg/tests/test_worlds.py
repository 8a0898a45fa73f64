"""World model: heading lattice, grids, visibility graph, JSON round trip."""

from __future__ import annotations

import math
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from dualnav import (
    LocoState,
    OrientationSet,
    PhysicalGrid,
    VirtualGraph,
    VirtualWorld,
    build_visibility_graph,
    path_clear_physical,
    segment_clear_virtual,
    virtual_neighbors,
    world_from_json,
    world_to_json,
)


# ---------------------------------------------------------------------------
# OrientationSet
# ---------------------------------------------------------------------------

def test_snap_identity_on_lattice():
    ors = OrientationSet(k=8)
    for a in ors.angles:
        assert ors.snap(a) == a


def test_snap_nearest():
    ors = OrientationSet(k=8)
    assert ors.snap(40.0) == 45.0
    assert ors.snap(50.0) == 45.0
    assert ors.snap(359.0) == 0.0
    assert ors.snap(-10.0) == 0.0


def test_snap_tie_counter_clockwise():
    ors = OrientationSet(k=8)
    # 22.5 is equidistant from 0 and 45; the CCW (larger ahead) angle wins
    assert ors.snap(22.5) == 45.0
    assert ors.snap(67.5) == 90.0


@given(st.floats(-720, 720))
def test_snap_error_bounded(theta):
    ors = OrientationSet(k=8)
    a = ors.snap(theta)
    assert a in ors.angles
    err = abs((theta - a + 180.0) % 360.0 - 180.0)
    assert err <= 22.5 + 1e-9


# ---------------------------------------------------------------------------
# LocoState
# ---------------------------------------------------------------------------

def test_loco_state_key_normalizes_headings():
    a = LocoState((1, 2), 370.0, (3, 4), -90.0)
    assert a.key() == ((1, 2), 10.0, (3, 4), 270.0)


def test_loco_state_ordering_and_equality():
    a = LocoState((1, 2), 0.0, (3, 4), 0.0)
    b = LocoState((1, 2), 0.0, (3, 4), 90.0)
    assert a < b
    assert a == LocoState((1, 2), 0.0, (3, 4), 0.0)


# ---------------------------------------------------------------------------
# PhysicalGrid
# ---------------------------------------------------------------------------

ROWS = ["#####", "#...#", "#.#.#", "#...#", "#####"]


def test_grid_roundtrip():
    grid = PhysicalGrid.from_rows(ROWS, cell_size=1.0)
    assert grid.to_rows() == ROWS
    assert grid.n_rows == grid.n_cols == 5


def test_grid_point_free():
    grid = PhysicalGrid.from_rows(ROWS, cell_size=1.0)
    assert grid.point_free((1.5, 1.5))
    assert not grid.point_free((2.5, 2.5))  # center obstacle
    assert not grid.point_free((0.5, 0.5))  # boundary wall
    assert not grid.point_free((9.0, 0.5))  # outside


def test_grid_origin_shift():
    grid = PhysicalGrid.from_rows(ROWS, cell_size=1.0, origin=(10.0, 10.0))
    assert grid.point_free((11.5, 11.5))
    assert not grid.point_free((1.5, 1.5))


def test_path_clear_physical():
    grid = PhysicalGrid.from_rows(ROWS, cell_size=1.0)
    assert path_clear_physical(grid, [(1.5, 1.5), (3.5, 1.5)])
    assert not path_clear_physical(grid, [(1.5, 2.5), (3.5, 2.5)])  # through block


# ---------------------------------------------------------------------------
# VirtualWorld / visibility graph
# ---------------------------------------------------------------------------

def _world():
    return VirtualWorld(
        bounds=(0.0, 0.0, 10.0, 10.0),
        obstacles=(((4.0, 4.0), (6.0, 4.0), (6.0, 6.0), (4.0, 6.0)),),
        pois=(("a", (1.0, 5.0)), ("b", (9.0, 5.0))),
    )


def test_point_free_virtual():
    w = _world()
    assert w.point_free((1, 1))
    assert not w.point_free((5, 5))
    assert w.point_free((4, 5))  # boundary of the obstacle is allowed
    assert not w.point_free((11, 5))


def test_segment_clear_virtual():
    w = _world()
    assert not segment_clear_virtual(w, (1, 5), (9, 5))
    assert segment_clear_virtual(w, (1, 1), (9, 1))


def test_visibility_graph_routes_around_obstacle():
    w = _world()
    g = build_visibility_graph(w)
    # a and b see the obstacle corners but not each other
    assert g.node_at((1.0, 5.0)) == "a"
    assert "b" not in g.neighbors("a")
    sp = g.shortest_path("a", "b")
    assert sp is not None
    path, length = sp
    assert path[0] == "a" and path[-1] == "b"
    # the detour via a corner must beat the blocked straight line 8.0
    assert length > 8.0
    assert length < 8.5


def test_virtual_neighbors_sorted():
    w = _world()
    g = build_visibility_graph(w)
    names = [n for n, _ in virtual_neighbors(g, "a")]
    assert names == sorted(names)


# ---------------------------------------------------------------------------
# VirtualGraph.dijkstra against networkx
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_dijkstra_matches_networkx(seed):
    rnd = random.Random(seed)
    g = VirtualGraph()
    h = nx.Graph()
    n = 12
    for i in range(n):
        g.add_node(f"n{i}", (rnd.uniform(0, 10), rnd.uniform(0, 10)))
    for i in range(n - 1):
        g.add_edge(f"n{i}", f"n{i+1}")
    for _ in range(8):
        a, b = rnd.sample(range(n), 2)
        g.add_edge(f"n{a}", f"n{b}")
    for u in g.nodes:
        for v, l in g.neighbors(u).items():
            h.add_edge(u, v, weight=l)
    dist_g, _ = g.dijkstra("n0")
    dist_nx = nx.single_source_dijkstra_path_length(h, "n0")
    assert set(dist_g) == set(dist_nx)
    for k in dist_g:
        assert math.isclose(dist_g[k], dist_nx[k], abs_tol=1e-9)


# ---------------------------------------------------------------------------
# JSON format
# ---------------------------------------------------------------------------

def test_world_json_roundtrip():
    w = _world()
    grid = PhysicalGrid.from_rows(ROWS, cell_size=0.5, origin=(1.0, 2.0))
    text = world_to_json(w, grid)
    w2, grid2 = world_from_json(text)
    assert w2.bounds == w.bounds
    assert w2.obstacles == w.obstacles
    assert w2.pois == w.pois
    assert grid2.cells == grid.cells
    assert grid2.cell_size == grid.cell_size
    assert grid2.origin == grid.origin
