"""Transition-cost providers, range tables, and greedy realization."""

from __future__ import annotations

import math

import pytest

from dualnav import (
    CostModel,
    KinematicMILProvider,
    MILRange,
    OrientationSet,
    PhysicalGrid,
    TableMILProvider,
    VirtualGraph,
    Worlds,
    aggregate_bounds,
    bin_length,
    build_mil_range,
    compute_mil,
    greedy_realize,
)
from dualnav.mil import _gain_grid, obstacle_distance
from dualnav.paths import Unrealizable
from dualnav.worlds import LocoState

from conftest import DEMO_MIL_RECORDS, ST_S, B2, B3, F_B, make_demo


def test_bin_length():
    assert bin_length(2.24) == 2.2
    assert bin_length(2.25) == 2.2  # round-half-even at the bin edge
    assert bin_length(6.32) == 6.3
    assert bin_length(0.04) == 0.0
    assert bin_length(1.37, quantum=0.5) == 1.5


# ---------------------------------------------------------------------------
# Table provider
# ---------------------------------------------------------------------------

def test_table_provider_lookup():
    p = TableMILProvider(DEMO_MIL_RECORDS)
    assert p.mil(ST_S, B2) == 0.17
    assert p.mil(B2, B3) == 1.0
    # not symmetric, absent entries are unreachable
    assert p.mil(B2, ST_S) == math.inf


def test_table_provider_successors():
    p = TableMILProvider(DEMO_MIL_RECORDS)
    succ = p.successors(ST_S, (3.0, 6.0))
    costs = sorted(c for _, c, _ in succ)
    assert costs == [0.0, 0.4, 3.0]  # F_B, F_C1, F_A


def test_table_provider_states_at():
    p = TableMILProvider(DEMO_MIL_RECORDS)
    at_f = p.states_at((3.0, 6.0))
    assert len(at_f) == 4  # F_A, F_B, F_C1, F_C2
    assert all(st.v_loc == (3.0, 6.0) for st in at_f)
    assert p.states_at((99.0, 99.0)) == []


def test_compute_mil_picks_minimum():
    p = TableMILProvider(DEMO_MIL_RECORDS)
    c, seq = compute_mil(ST_S, F_B, p)
    assert c == 0.0
    with pytest.raises(Unrealizable):
        compute_mil(B2, ST_S, p)


# ---------------------------------------------------------------------------
# Gain grids and the kinematic provider
# ---------------------------------------------------------------------------

def test_gain_grid_contains_identity_and_endpoints():
    grid = _gain_grid(0.78, 1.22, 1.0, n=21)
    for v in (0.78, 1.0, 1.22):
        assert any(abs(x - v) < 1e-9 for x in grid)
    assert min(grid) == pytest.approx(0.56)
    assert max(grid) == pytest.approx(1.44)
    assert grid == sorted(grid)


OPEN_ROOM = PhysicalGrid.from_rows(
    ["#" * 12] + ["#" + "." * 10 + "#" for _ in range(10)] + ["#" * 12],
    cell_size=1.0,
)


def corridor_provider(model=None, k=4):
    g = VirtualGraph()
    g.add_node("a", (0.0, 0.0))
    g.add_node("b", (2.0, 0.0))
    g.add_node("c", (4.0, 0.0))
    g.add_edge("a", "b")
    g.add_edge("b", "c")
    worlds = Worlds(physical=OPEN_ROOM, orientations=OrientationSet(k=k))
    model = model or CostModel(kind="DetectionThreshold")
    return g, KinematicMILProvider(worlds, model, g, n_gains=5)


def test_kinematic_identity_translation_is_free():
    g, prov = corridor_provider()
    st = LocoState((0.0, 0.0), 0.0, (3.5, 3.5), 0.0)
    succ = prov.successors(st, (2.0, 0.0))
    assert succ
    best_cost = min(c for _, c, _ in succ)
    assert best_cost == 0.0
    # the free option is the straight identity-gain step
    free = [t for t in succ if t[1] == 0.0]
    assert any(
        all(op.is_identity() for op in seq.ops) for _, _, seq in free
    )
    for st2, _, _ in succ:
        assert st2.v_loc == (2.0, 0.0)
        assert st2.v_heading == 0.0


def test_kinematic_successors_respect_walls():
    g, prov = corridor_provider()
    # one cell from the east wall, facing it: a 2 m straight step collides,
    # so every successor needs a non-straight physical realization
    st = LocoState((0.0, 0.0), 0.0, (9.5, 5.5), 0.0)
    succ = prov.successors(st, (2.0, 0.0))
    for _, c, seq in succ:
        assert c > 0.0 or any(not op.is_identity() for op in seq.ops)


def test_kinematic_memo_shared_across_virtual_positions():
    g, prov = corridor_provider()
    st_a = LocoState((0.0, 0.0), 0.0, (3.5, 3.5), 0.0)
    st_b = LocoState((2.0, 0.0), 0.0, (3.5, 3.5), 0.0)
    sa = prov.successors(st_a, (2.0, 0.0))
    sb = prov.successors(st_b, (4.0, 0.0))
    assert len(sa) == len(sb)
    assert [(s.p_loc, s.p_heading, c) for s, c, _ in sa] == [
        (s.p_loc, s.p_heading, c) for s, c, _ in sb
    ]


def test_kinematic_off_lattice_bearing_has_no_successors():
    g = VirtualGraph()
    g.add_node("a", (0.0, 0.0))
    g.add_node("b", (2.0, 1.0))  # bearing ~26.6 deg, not on the k=4 lattice
    g.add_edge("a", "b")
    worlds = Worlds(physical=OPEN_ROOM, orientations=OrientationSet(k=4))
    prov = KinematicMILProvider(worlds, CostModel(), g, n_gains=5)
    st = LocoState((0.0, 0.0), 0.0, (3.5, 3.5), 0.0)
    assert prov.successors(st, (2.0, 1.0)) == []


def test_kinematic_mil_matches_successors():
    g, prov = corridor_provider()
    st = LocoState((0.0, 0.0), 0.0, (3.5, 3.5), 0.0)
    succ = prov.successors(st, (2.0, 0.0))
    st2, c, _ = succ[0]
    assert prov.mil(st, st2) == c


# ---------------------------------------------------------------------------
# MILRange
# ---------------------------------------------------------------------------

def test_range_lookup_and_defaults():
    rng = MILRange(quantum=0.1, bins={2.2: (1.0, 3.0)})
    assert rng.alpha(2.24) == 1.0
    assert rng.beta(2.16) == 3.0
    assert rng.alpha(9.9) == 0.0  # absent: no lower bound
    assert rng.beta(9.9) == math.inf  # absent: unbounded above


def test_range_csv_roundtrip():
    rng = MILRange(quantum=0.1, bins={1.0: (0.0, 1.0), 2.2: (1.0, 3.0)})
    text = rng.to_csv()
    assert text.splitlines()[0] == "length_bin,alpha,beta"
    back = MILRange.from_csv(text)
    assert back.bins == rng.bins


def test_build_mil_range_from_demo_table():
    demo = make_demo()
    states = {
        n: demo.provider.states_at(demo.graph.nodes[n]) for n in demo.graph.nodes
    }
    rng = build_mil_range(demo.graph, demo.provider, states)
    # every computed bin is internally consistent
    for l, (a, b) in rng.bins.items():
        assert a <= b + 1e-12
    # the 4.1 bin is fed only by the H->T transition of cost 1.4
    assert rng.bins[4.1] == (1.4, 1.4)
    # S->F: best over sources is min(3.0, 0.0, 0.4)=0 for alpha; each source
    # has a cheapest target of 0.17 (S), 0 / 0.4 variants on F/G2 edges
    assert rng.bins[2.2][0] == 0.0


def test_aggregate_bounds_demo_path():
    demo = make_demo()
    a, b = aggregate_bounds(["S", "A", "B", "D", "T"], demo.graph, demo.rng)
    # 4.0->(2,3), 6.32->(3,4), 1.0->(0,1), 3.61->(2,3)
    assert a == pytest.approx(7.0)
    assert b == pytest.approx(11.0)
    with pytest.raises(ValueError):
        aggregate_bounds(["S", "T"], demo.graph, demo.rng)


# ---------------------------------------------------------------------------
# Greedy realization
# ---------------------------------------------------------------------------

def test_greedy_realize_demo_blue2():
    demo = make_demo()
    p = greedy_realize(["S", "F", "G2", "H", "T"], demo.st_s, demo.graph,
                       demo.provider, demo.grid)
    assert p.cost == pytest.approx(5.0)  # 0 + 1.8 + 1.8 + 1.4
    assert p.length == pytest.approx(10.7)
    assert len(p.states) == 5


def test_greedy_realize_respects_start():
    demo = make_demo()
    with pytest.raises(ValueError):
        greedy_realize(["A", "B"], demo.st_s, demo.graph, demo.provider)


def test_greedy_realize_dead_end():
    demo = make_demo()
    with pytest.raises(Unrealizable):
        # no table entry covers going back from B to A
        greedy_realize(["S", "A", "S"], demo.st_s, demo.graph, demo.provider)


def test_obstacle_distance():
    grid = PhysicalGrid.from_rows(["...", ".#.", "..."], cell_size=1.0)
    assert obstacle_distance(grid, (1.5, 1.5)) == 0.0
    assert obstacle_distance(grid, (0.5, 1.5)) == 1.0
    assert obstacle_distance(None, (0.0, 0.0)) == math.inf
