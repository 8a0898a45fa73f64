"""Planar geometry helpers: segment predicates, polygon tests, grid traversal."""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Sequence

Point = tuple[float, float]

EPS = 1e-9


def dist(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def _orient(a: Point, b: Point, c: Point) -> float:
    """Signed area of triangle abc (positive when counter-clockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    """True when p lies on segment ab (assumes p is collinear with ab)."""
    return (
        min(a[0], b[0]) - EPS <= p[0] <= max(a[0], b[0]) + EPS
        and min(a[1], b[1]) - EPS <= p[1] <= max(a[1], b[1]) + EPS
    )


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when closed segments ab and cd share at least one point."""
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    if ((o1 > EPS) != (o2 > EPS)) and ((o3 > EPS) != (o4 > EPS)) and (
        abs(o1) > EPS and abs(o2) > EPS and abs(o3) > EPS and abs(o4) > EPS
    ):
        return True
    if abs(o1) <= EPS and _on_segment(a, b, c):
        return True
    if abs(o2) <= EPS and _on_segment(a, b, d):
        return True
    if abs(o3) <= EPS and _on_segment(c, d, a):
        return True
    if abs(o4) <= EPS and _on_segment(c, d, b):
        return True
    return False


def segments_properly_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when ab and cd cross at a point interior to both segments."""
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    return (
        abs(o1) > EPS
        and abs(o2) > EPS
        and abs(o3) > EPS
        and abs(o4) > EPS
        and (o1 > 0) != (o2 > 0)
        and (o3 > 0) != (o4 > 0)
    )


def point_in_polygon(p: Point, poly: Sequence[Point]) -> bool:
    """Even-odd test; points on the boundary count as inside."""
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        if abs(_orient((ax, ay), (bx, by), p)) <= EPS and _on_segment(
            (ax, ay), (bx, by), p
        ):
            return True
        if (ay > y) != (by > y):
            xi = ax + (y - ay) * (bx - ax) / (by - ay)
            if x < xi:
                inside = not inside
    return inside


def point_strictly_in_polygon(p: Point, poly: Sequence[Point]) -> bool:
    """Even-odd test excluding the boundary."""
    for i in range(len(poly)):
        a = poly[i]
        b = poly[(i + 1) % len(poly)]
        if abs(_orient(a, b, p)) <= EPS and _on_segment(a, b, p):
            return False
    return point_in_polygon(p, poly)


def segment_blocked_by_polygon(a: Point, b: Point, poly: Sequence[Point]) -> bool:
    """True when open segment ab passes through the interior of poly.

    Touching the boundary (shared vertex, grazing an edge) does not block;
    this is what lets visibility edges run along obstacle corners.
    """
    n = len(poly)
    for i in range(n):
        c = poly[i]
        d = poly[(i + 1) % n]
        if segments_properly_intersect(a, b, c, d):
            return True
    mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    if point_strictly_in_polygon(mid, poly):
        return True
    # Guard against a chord that enters and leaves through vertices: sample a
    # few interior points rather than just the midpoint.
    for t in (0.25, 0.75):
        q = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        if point_strictly_in_polygon(q, poly):
            return True
    return False


def supercover_cells(a: Point, b: Point, cell: float) -> Iterator[tuple[int, int]]:
    """Yield every grid cell (col, row) the closed segment ab touches.

    Cells are axis-aligned squares of side `cell` with cell (i, j) covering
    [i*cell, (i+1)*cell] x [j*cell, (j+1)*cell].  A conservative supercover:
    when the segment passes exactly through a lattice point, all four
    adjacent cells are reported.
    """
    seen: set[tuple[int, int]] = set()
    length = dist(a, b)
    steps = max(1, int(math.ceil(length / (cell * 0.45))))
    for k in range(steps + 1):
        t = k / steps
        p = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        for c in _cells_at(p, cell):
            if c not in seen:
                seen.add(c)
                yield c


def _cells_at(p: Point, cell: float) -> list[tuple[int, int]]:
    """All cells whose closed square contains p (up to four on lattice lines)."""
    x, y = p[0] / cell, p[1] / cell
    cols = {int(math.floor(x))}
    rows = {int(math.floor(y))}
    if abs(x - round(x)) < EPS / cell:
        cols.update((int(round(x)) - 1, int(round(x))))
    if abs(y - round(y)) < EPS / cell:
        rows.update((int(round(y)) - 1, int(round(y))))
    return [(c, r) for c in cols for r in rows]


def arc_points(
    start: Point, heading_deg: float, curvature: float, length: float, n: int = 16
) -> list[Point]:
    """Sample points along a constant-curvature arc (straight when curvature=0).

    heading_deg is the initial travel direction; curvature is in rad/m,
    positive bending counter-clockwise.
    """
    th = math.radians(heading_deg)
    pts: list[Point] = []
    for k in range(n + 1):
        s = length * k / n
        if abs(curvature) < EPS:
            pts.append((start[0] + s * math.cos(th), start[1] + s * math.sin(th)))
        else:
            pts.append(
                (
                    start[0] + (math.sin(th + curvature * s) - math.sin(th)) / curvature,
                    start[1] + (math.cos(th) - math.cos(th + curvature * s)) / curvature,
                )
            )
    return pts


def polyline_length(pts: Iterable[Point]) -> float:
    pts = list(pts)
    return sum(dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))
