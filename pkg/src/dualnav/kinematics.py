"""Redirected-walking operations: transition functions and cost models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import EPS, arc_points
from .worlds import LocoState, OrientationSet, PhysicalGrid, VirtualWorld, path_clear_physical


class OutOfWorld(Exception):
    """An operation moved the physical location outside the grid."""


class Collision(Exception):
    """An operation's physical trajectory crossed an obstacle cell."""


TRANSLATION = "Translation"
ROTATION = "Rotation"
CURVATURE = "Curvature"
RESET = "Reset"


@dataclass(frozen=True)
class RWOperation:
    """One redirected-walking operation.

    magnitude is the gain (m_T, m_R, m_C) or, for Reset, the turn angle in
    degrees.  walk_length is the physical walking distance (0 for Rotation and
    Reset).  angle is the physical turn Δθ in degrees for Rotation.
    """

    kind: str
    magnitude: float
    walk_length: float = 0.0
    angle: float = 0.0

    def is_identity(self) -> bool:
        if self.kind == TRANSLATION:
            return abs(self.magnitude - 1.0) <= EPS
        if self.kind == ROTATION:
            return abs(self.magnitude - 1.0) <= EPS or abs(self.angle) <= EPS
        if self.kind == CURVATURE:
            return abs(self.magnitude) <= EPS
        if self.kind == RESET:
            return abs(self.magnitude) <= EPS
        raise ValueError(self.kind)


@dataclass(frozen=True)
class Worlds:
    """Shared context for applying operations: both worlds plus the heading
    lattice used for post-operation snapping."""

    virtual: VirtualWorld | None = None
    physical: PhysicalGrid | None = None
    orientations: OrientationSet | None = None
    snap: bool = True


def _advance(loc, heading_deg: float, d: float):
    th = math.radians(heading_deg)
    return (loc[0] + d * math.cos(th), loc[1] + d * math.sin(th))


def _snap_cell(grid: PhysicalGrid, p):
    """Snap a point to the center of its containing grid cell."""
    ox, oy = grid.origin
    col = int(math.floor((p[0] - ox) / grid.cell_size))
    row = int(math.floor((p[1] - oy) / grid.cell_size))
    return (
        ox + (col + 0.5) * grid.cell_size,
        oy + (row + 0.5) * grid.cell_size,
    )


def apply_operation(st: LocoState, op: RWOperation, worlds: Worlds) -> LocoState:
    """Apply one RW operation to a loco-state.

    Translation: virtual advances walk_length * m_T along the virtual
    heading; physical advances walk_length along the physical heading.
    Rotation: virtual heading turns m_R * angle; physical heading turns angle.
    Curvature: virtual advances walk_length straight; physical follows a
    constant-curvature arc (gain in rad/m), ending heading turned by
    m_C * walk_length radians.
    Reset: physical heading turns by magnitude; virtual pose unchanged.

    Raises OutOfWorld when the resulting physical location leaves the grid
    and Collision when the physical trajectory crosses an obstacle cell.
    """
    k = op.kind
    phys_traj = None
    if k == TRANSLATION:
        v_loc = _advance(st.v_loc, st.v_heading, op.walk_length * op.magnitude)
        p_loc = _advance(st.p_loc, st.p_heading, op.walk_length)
        out = LocoState(v_loc, st.v_heading, p_loc, st.p_heading)
        phys_traj = [st.p_loc, p_loc]
    elif k == ROTATION:
        out = LocoState(
            st.v_loc,
            (st.v_heading + op.magnitude * op.angle) % 360.0,
            st.p_loc,
            (st.p_heading + op.angle) % 360.0,
        )
    elif k == CURVATURE:
        v_loc = _advance(st.v_loc, st.v_heading, op.walk_length)
        pts = arc_points(st.p_loc, st.p_heading, op.magnitude, op.walk_length)
        p_heading = (st.p_heading + math.degrees(op.magnitude * op.walk_length)) % 360.0
        out = LocoState(v_loc, st.v_heading, pts[-1], p_heading)
        phys_traj = pts
    elif k == RESET:
        out = LocoState(
            st.v_loc,
            st.v_heading,
            st.p_loc,
            (st.p_heading + op.magnitude) % 360.0,
        )
    else:
        raise ValueError(k)

    if worlds.physical is not None:
        if not worlds.physical.point_free(out.p_loc):
            if _in_grid(worlds.physical, out.p_loc):
                raise Collision(f"{k} lands in an obstacle cell")
            raise OutOfWorld(f"{k} leaves the physical grid")
        if phys_traj is not None and not path_clear_physical(worlds.physical, phys_traj):
            raise Collision(f"{k} trajectory crosses an obstacle cell")
    if worlds.snap:
        v_h, p_h = out.v_heading, out.p_heading
        if worlds.orientations is not None:
            v_h = worlds.orientations.snap(v_h)
            p_h = worlds.orientations.snap(p_h)
        p_loc = out.p_loc
        if worlds.physical is not None:
            p_loc = _snap_cell(worlds.physical, p_loc)
        out = LocoState(out.v_loc, v_h, p_loc, p_h)
    return out


def _in_grid(grid: PhysicalGrid, p) -> bool:
    ox, oy = grid.origin
    return (
        ox <= p[0] <= ox + grid.n_cols * grid.cell_size
        and oy <= p[1] <= oy + grid.n_rows * grid.cell_size
    )


# ---------------------------------------------------------------------------
# Cost models
# ---------------------------------------------------------------------------

USAGE_COUNT = "UsageCount"
DETECTION_LIKELIHOOD = "DetectionLikelihood"
DETECTION_THRESHOLD = "DetectionThreshold"

# Default non-detectable gain intervals (closed, per operation kind).
DEFAULT_THRESHOLDS: dict[str, tuple[float, float]] = {
    TRANSLATION: (0.78, 1.22),
    ROTATION: (0.77, 1.10),
    CURVATURE: (-1.0 / 7.5, 1.0 / 7.5),
}


def _default_likelihood_curves(
    thresholds: dict[str, tuple[float, float]]
) -> dict[str, list[tuple[float, float]]]:
    """Piecewise-linear gain -> detection-probability curves.

    Probability is 0 inside the non-detectable interval and ramps linearly
    to 1 once the gain's distance from identity reaches twice the interval
    edge's distance.  The translation curve additionally passes through the
    measured point (0.6, 0.9).
    """
    identities = {TRANSLATION: 1.0, ROTATION: 1.0, CURVATURE: 0.0}
    curves: dict[str, list[tuple[float, float]]] = {}
    for kind, (lo, hi) in thresholds.items():
        ident = identities[kind]
        lo_one = ident - 2.0 * (ident - lo)
        hi_one = ident + 2.0 * (hi - ident)
        pts = [(lo_one, 1.0), (lo, 0.0), (hi, 0.0), (hi_one, 1.0)]
        if kind == TRANSLATION and lo_one < 0.6 < lo:
            pts.insert(1, (0.6, 0.9))
        curves[kind] = sorted(pts)
    return curves


@dataclass(frozen=True)
class CostModel:
    """Pluggable per-operation cost: usage count, detection likelihood, or
    detection threshold, plus the reset-cost knob."""

    kind: str = USAGE_COUNT
    reset_cost: float = 1.0
    reset_angle_weighted: bool = False
    thresholds: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_THRESHOLDS)
    )
    likelihood_curves: dict[str, list[tuple[float, float]]] | None = None

    def _curves(self) -> dict[str, list[tuple[float, float]]]:
        if self.likelihood_curves is not None:
            return self.likelihood_curves
        return _default_likelihood_curves(self.thresholds)

    @classmethod
    def from_config(cls, cfg: dict) -> "CostModel":
        thresholds = dict(DEFAULT_THRESHOLDS)
        for k, v in cfg.get("thresholds", {}).items():
            thresholds[k] = (float(v[0]), float(v[1]))
        return cls(
            kind=cfg.get("kind", USAGE_COUNT),
            reset_cost=float(cfg.get("reset_cost", 1.0)),
            reset_angle_weighted=bool(cfg.get("reset_angle_weighted", False)),
            thresholds=thresholds,
        )


def _interp(curve: list[tuple[float, float]], x: float) -> float:
    if x <= curve[0][0]:
        return curve[0][1]
    if x >= curve[-1][0]:
        return curve[-1][1]
    for (x0, y0), (x1, y1) in zip(curve, curve[1:]):
        if x0 <= x <= x1:
            if x1 - x0 <= EPS:
                return max(y0, y1)
            y = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            return min(1.0, max(0.0, y))
    return curve[-1][1]


def operation_cost(op: RWOperation, model: CostModel) -> float:
    """Cost of one operation under the model; identity magnitudes cost 0."""
    if op.is_identity():
        return 0.0
    if op.kind == RESET:
        c = model.reset_cost
        if model.reset_angle_weighted:
            c *= abs(op.magnitude) / 180.0
        return c
    if model.kind == USAGE_COUNT:
        return 1.0
    lo, hi = model.thresholds[op.kind]
    if model.kind == DETECTION_THRESHOLD:
        unit = 0.0 if lo - EPS <= op.magnitude <= hi + EPS else 1.0
    elif model.kind == DETECTION_LIKELIHOOD:
        unit = _interp(model._curves()[op.kind], op.magnitude)
    else:
        raise ValueError(model.kind)
    if op.kind in (TRANSLATION, CURVATURE):
        return unit * op.walk_length
    return unit


def sequence_cost(ops: list[RWOperation], model: CostModel) -> float:
    return sum(operation_cost(op, model) for op in ops)
