"""SVG export: both worlds side by side with route overlays."""

from __future__ import annotations

from .paths import RWPath
from .worlds import PhysicalGrid, VirtualWorld

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def export_paths_svg(
    world: VirtualWorld,
    grid: PhysicalGrid | None,
    paths: list[RWPath],
    scale: float = 20.0,
) -> str:
    """Render the virtual world (left) and physical grid (right) with each
    path's virtual and physical polylines; hop endpoints get dot glyphs."""
    xmin, ymin, xmax, ymax = world.bounds
    vw = (xmax - xmin) * scale
    vh = (ymax - ymin) * scale
    gap = 2.0 * scale
    pw = ph = 0.0
    if grid is not None:
        pw = grid.n_cols * grid.cell_size * scale
        ph = grid.n_rows * grid.cell_size * scale
    width = vw + gap + pw
    height = max(vh, ph)

    def vx(x: float) -> float:
        return (x - xmin) * scale

    def vy(y: float) -> float:
        return height - (y - ymin) * scale

    def px(x: float) -> float:
        return vw + gap + (x - (grid.origin[0] if grid else 0.0)) * scale

    def py(y: float) -> float:
        return height - (y - (grid.origin[1] if grid else 0.0)) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect x="0" y="{height - vh:.1f}" width="{vw:.1f}" height="{vh:.1f}" '
        'fill="#fafafa" stroke="#333"/>',
    ]
    for ob in world.obstacles:
        pts = " ".join(f"{vx(x):.1f},{vy(y):.1f}" for x, y in ob)
        parts.append(f'<polygon points="{pts}" fill="#bbb" stroke="#555"/>')
    for name, (x, y) in world.pois:
        parts.append(
            f'<circle cx="{vx(x):.1f}" cy="{vy(y):.1f}" r="3" fill="#333"/>'
        )
    if grid is not None:
        parts.append(
            f'<rect x="{vw + gap:.1f}" y="{height - ph:.1f}" width="{pw:.1f}" '
            f'height="{ph:.1f}" fill="#fafafa" stroke="#333"/>'
        )
        cs = grid.cell_size * scale
        ox, oy = grid.origin
        for r in range(grid.n_rows):
            for c in range(grid.n_cols):
                if grid.cells[r][c]:
                    x = px(ox + c * grid.cell_size)
                    y = py(oy + (r + 1) * grid.cell_size)
                    parts.append(
                        f'<rect x="{x:.1f}" y="{y:.1f}" width="{cs:.1f}" '
                        f'height="{cs:.1f}" fill="#bbb"/>'
                    )
    for i, path in enumerate(paths):
        color = _COLORS[i % len(_COLORS)]
        if len(path.states) >= 2:
            vpts = " ".join(
                f"{vx(st.v_loc[0]):.1f},{vy(st.v_loc[1]):.1f}" for st in path.states
            )
            parts.append(
                f'<polyline points="{vpts}" fill="none" stroke="{color}" '
                'stroke-width="2"/>'
            )
            if grid is not None:
                ppts = " ".join(
                    f"{px(st.p_loc[0]):.1f},{py(st.p_loc[1]):.1f}"
                    for st in path.states
                )
                parts.append(
                    f'<polyline points="{ppts}" fill="none" stroke="{color}" '
                    'stroke-width="2" stroke-dasharray="4 2"/>'
                )
        for st in path.states:
            parts.append(
                f'<circle cx="{vx(st.v_loc[0]):.1f}" cy="{vy(st.v_loc[1]):.1f}" '
                f'r="2.5" fill="{color}"/>'
            )
            if grid is not None:
                parts.append(
                    f'<circle cx="{px(st.p_loc[0]):.1f}" '
                    f'cy="{py(st.p_loc[1]):.1f}" r="2.5" fill="{color}" '
                    'fill-opacity="0.6"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts)
