"""Planar-geometry helpers: independent oracles and property checks."""

from __future__ import annotations

import math

from hypothesis import given, strategies as st

from dualnav.geometry import (
    arc_points,
    dist,
    point_in_polygon,
    point_strictly_in_polygon,
    polyline_length,
    segment_blocked_by_polygon,
    segments_intersect,
    segments_properly_intersect,
    supercover_cells,
)

SQUARE = ((1.0, 1.0), (3.0, 1.0), (3.0, 3.0), (1.0, 3.0))


def test_segments_cross():
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))
    assert segments_properly_intersect((0, 0), (2, 2), (0, 2), (2, 0))


def test_segments_disjoint():
    assert not segments_intersect((0, 0), (1, 0), (0, 1), (1, 1))
    assert not segments_properly_intersect((0, 0), (1, 0), (0, 1), (1, 1))


def test_segments_touch_at_endpoint():
    # sharing an endpoint intersects, but not properly
    assert segments_intersect((0, 0), (1, 1), (1, 1), (2, 0))
    assert not segments_properly_intersect((0, 0), (1, 1), (1, 1), (2, 0))


def test_collinear_overlap():
    assert segments_intersect((0, 0), (2, 0), (1, 0), (3, 0))
    assert not segments_properly_intersect((0, 0), (2, 0), (1, 0), (3, 0))


def test_point_in_polygon():
    assert point_in_polygon((2, 2), SQUARE)
    assert not point_in_polygon((0, 0), SQUARE)
    # boundary counts as inside for the closed test, outside for the strict
    assert point_in_polygon((1, 2), SQUARE)
    assert not point_strictly_in_polygon((1, 2), SQUARE)
    assert point_strictly_in_polygon((2, 2), SQUARE)


def test_segment_blocked_by_polygon():
    assert segment_blocked_by_polygon((0, 2), (4, 2), SQUARE)
    assert not segment_blocked_by_polygon((0, 0), (4, 0), SQUARE)
    # grazing an edge does not block
    assert not segment_blocked_by_polygon((0, 1), (4, 1), SQUARE)
    # corner-to-corner chord through the interior blocks
    assert segment_blocked_by_polygon((1, 1), (3, 3), SQUARE)


def test_supercover_straight_line():
    cells = set(supercover_cells((0.5, 0.5), (2.5, 0.5), 1.0))
    assert {(0, 0), (1, 0), (2, 0)} <= cells
    assert all(r == 0 for _, r in cells)


def test_supercover_single_point():
    assert (1, 1) in set(supercover_cells((1.5, 1.5), (1.5, 1.5), 1.0))


def test_supercover_lattice_point_conservative():
    # passing exactly through a lattice corner reports all four cells
    cells = set(supercover_cells((0.5, 0.5), (1.5, 1.5), 1.0))
    assert {(0, 0), (1, 1), (0, 1), (1, 0)} <= cells


@given(
    st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)
)
def test_supercover_contains_endpoint_cells(x0, y0, x1, y1):
    cells = set(supercover_cells((x0, y0), (x1, y1), 1.0))
    assert (math.floor(x0), math.floor(y0)) in cells
    assert (math.floor(x1), math.floor(y1)) in cells


def test_arc_points_straight():
    pts = arc_points((0, 0), 0.0, 0.0, 2.0, n=4)
    assert pts[0] == (0, 0)
    assert math.isclose(pts[-1][0], 2.0)
    assert math.isclose(pts[-1][1], 0.0, abs_tol=1e-12)


def test_arc_points_quarter_circle():
    # curvature 1 rad/m over pi/2 meters: quarter circle of radius 1,
    # starting east ends at (sin(pi/2), 1-cos(pi/2)) = (1, 1)
    pts = arc_points((0, 0), 0.0, 1.0, math.pi / 2, n=64)
    assert math.isclose(pts[-1][0], 1.0, abs_tol=1e-9)
    assert math.isclose(pts[-1][1], 1.0, abs_tol=1e-9)


@given(st.floats(-0.2, 0.2), st.floats(0.1, 3.0))
def test_arc_length_preserved(curv, length):
    # sampled arc length approaches the nominal length
    pts = arc_points((0, 0), 30.0, curv, length, n=256)
    assert math.isclose(polyline_length(pts), length, rel_tol=1e-3)


def test_arc_small_curvature_matches_straight():
    a = arc_points((0, 0), 45.0, 1e-12, 1.0, n=8)
    b = arc_points((0, 0), 45.0, 0.0, 1.0, n=8)
    for (x0, y0), (x1, y1) in zip(a, b):
        assert math.isclose(x0, x1, abs_tol=1e-6)
        assert math.isclose(y0, y1, abs_tol=1e-6)


def test_polyline_length():
    assert polyline_length([(0, 0), (3, 0), (3, 4)]) == 7.0
    assert dist((0, 0), (3, 4)) == 5.0
