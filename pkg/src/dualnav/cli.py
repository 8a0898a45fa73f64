"""Command-line front end: solving, benchmarking, spatial queries,
generation, range-table export, and rendering."""

from __future__ import annotations

import json
import math
import pathlib
import sys

import click

from .baselines import cola_estimated, ksp_reset, mcp
from .dewn import DewnOptions, dewn
from .exact import DROPQuery, basic_dp
from .harness import (
    GeneratedWorld,
    RunReport,
    Scenario,
    generate_maze,
    generate_synthetic_city,
    kinematic_scenario,
    run_matrix,
)
from .kinematics import CostModel, Worlds
from .mil import KinematicMILProvider, MILRange, build_mil_range
from .paths import Infeasible
from .render import export_paths_svg
from .search import ReferenceNotFound
from .spatial import DkNNQuery, DRQuery, FewerThanK, SpatialEngine, dknn, drange
from .worlds import (
    LocoState,
    OrientationSet,
    PhysicalGrid,
    VirtualWorld,
    build_visibility_graph,
    world_from_json,
    world_to_json,
)


def _load_world(path: str):
    data = pathlib.Path(path).read_text()
    world, grid = world_from_json(data)
    cfg = json.loads(data).get("cost_model", {})
    model = CostModel.from_config(cfg) if cfg else CostModel()
    return world, grid, model


def _context(world, grid, model, cutoff=math.inf):
    graph = build_visibility_graph(world, cutoff)
    orientations = OrientationSet(k=8)
    worlds = Worlds(virtual=world, physical=grid, orientations=orientations)
    provider = KinematicMILProvider(worlds, model, graph)
    gen = GeneratedWorld(world=world, grid=grid, graph=graph)
    return gen, graph, provider, orientations


def _start_state(world, grid, graph, start: str, p_start: str | None) -> LocoState:
    v = world.poi_point(start)
    if p_start:
        x, y, h = (float(t) for t in p_start.split(","))
        return LocoState(v, h, (x, y), h)
    ox, oy = grid.origin
    center = (
        ox + grid.n_cols * grid.cell_size / 2.0,
        oy + grid.n_rows * grid.cell_size / 2.0,
    )
    return LocoState(v, 0.0, center, 0.0)


def _write(out: str | None, text: str) -> None:
    if out:
        pathlib.Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text)


_ABLATION = [
    click.option("--disable-pruning", multiple=True, type=click.Choice(["ILSP", "SLSP", "ULSL"])),
    click.option("--disable-ordering", multiple=True, type=click.Choice(["TECO", "PWSO", "VWNO"])),
    click.option("--cos-simplify", is_flag=True, default=False),
    click.option("--reference-only", is_flag=True, default=False),
]


def _ablate(f):
    for opt in reversed(_ABLATION):
        f = opt(f)
    return f


@click.group()
def main() -> None:
    """Dual-world constrained route planning."""


@main.command()
@click.option("--world", "world_path", required=True, type=click.Path(exists=True))
@click.option("--start", required=True, help="start POI name")
@click.option("--target", required=True, help="destination POI name")
@click.option("--p-start", default=None, help="physical start 'x,y,heading'")
@click.option("--algo", default="dewn",
              type=click.Choice(["dewn", "sdewn", "basic_dp", "mcp", "ksp_reset", "cola"]))
@click.option("--C", "budget", default=10.0, type=float)
@click.option("--epsilon", default=0.1, type=float)
@click.option("--k", default=5, type=int)
@click.option("--cost-model", "cost_model", default=None,
              type=click.Choice(["UsageCount", "DetectionLikelihood", "DetectionThreshold"]))
@click.option("--out", default=None, type=click.Path())
@_ablate
def solve(world_path, start, target, p_start, algo, budget, epsilon, k,
          cost_model, out, disable_pruning, disable_ordering, cos_simplify,
          reference_only) -> None:
    """Solve one routing query and print the route and operations."""
    world, grid, model = _load_world(world_path)
    if cost_model:
        model = CostModel(kind=cost_model, reset_cost=model.reset_cost)
    gen, graph, provider, orientations = _context(world, grid, model)
    st_s = _start_state(world, grid, graph, start, p_start)
    q = DROPQuery(st_s=st_s, target=world.poi_point(target), budget=budget,
                  epsilon=epsilon)
    opts = DewnOptions(
        epsilon=epsilon,
        cos_simplify=cos_simplify,
        reference_only=reference_only,
        disable_pruning=tuple(disable_pruning),
        disable_ordering=tuple(disable_ordering),
    )
    rng = build_mil_range(graph, provider, _states_for(graph, grid, orientations))
    try:
        if algo in ("dewn", "sdewn"):
            if algo == "sdewn":
                opts = DewnOptions(epsilon=epsilon, reference_only=True)
            path = dewn(q, graph, provider, rng, grid, opts)
        elif algo == "basic_dp":
            path = basic_dp(q, graph, provider)
        elif algo == "mcp":
            path = mcp(q, graph, provider)
        elif algo == "ksp_reset":
            path = ksp_reset(q, graph, grid, orientations, model, k)
        else:
            path = cola_estimated(q, graph, provider, rng, grid)
    except (Infeasible, ReferenceNotFound) as exc:
        click.echo(f"infeasible: {exc}")
        sys.exit(1)
    lines = [f"length={path.length:.4f} cost={path.cost:.4f}"]
    for i, st in enumerate(path.states):
        lines.append(
            f"  [{i}] v={st.v_loc} h={st.v_heading:.1f}  p={st.p_loc} "
            f"h={st.p_heading:.1f}"
        )
        if i < len(path.ops):
            for op in path.ops[i].ops:
                lines.append(
                    f"       -> {op.kind} magnitude={op.magnitude:.3f} "
                    f"walk={op.walk_length:.3f} angle={op.angle:.1f}"
                )
    _write(out, "\n".join(lines))


def _states_for(graph, grid, orientations):
    gen = GeneratedWorld(world=None, grid=grid, graph=graph)
    from .harness import _sample_states

    return _sample_states(gen, orientations, seed=0)


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, type=int)
@click.option("--out", default=None, type=click.Path())
def bench(scenario_path, seed, out) -> None:
    """Run a scenario file: every algorithm on every query, CSV out."""
    cfg = json.loads(pathlib.Path(scenario_path).read_text())
    world, grid, model = _load_world(cfg["world"])
    gen, graph, provider, orientations = _context(world, grid, model)
    queries = []
    for spec in cfg["queries"]:
        st_s = _start_state(world, grid, graph, spec["start"], spec.get("p_start"))
        queries.append(
            DROPQuery(
                st_s=st_s,
                target=world.poi_point(spec["target"]),
                budget=float(spec.get("C", cfg.get("C", 10.0))),
                epsilon=float(spec.get("epsilon", cfg.get("epsilon", 0.1))),
            )
        )
    scn = kinematic_scenario(
        gen, queries, cfg.get("algorithms", ["dewn", "mcp"]), model=model,
        orientations=orientations, name=cfg.get("name", "bench"), seed=seed,
    )
    report = run_matrix(scn)
    _write(out, report.to_csv())
    click.echo(report.aggregates_csv())


@main.command()
@click.option("--world", "world_path", required=True, type=click.Path(exists=True))
@click.option("--start", required=True)
@click.option("--p-start", default=None)
@click.option("--k", default=3, type=int)
@click.option("--C", "budget", default=10.0, type=float)
@click.option("--epsilon", default=0.1, type=float)
@click.option("--out", default=None, type=click.Path())
def knn(world_path, start, p_start, k, budget, epsilon, out) -> None:
    """k nearest POIs by feasible route length."""
    world, grid, model = _load_world(world_path)
    gen, graph, provider, orientations = _context(world, grid, model)
    st_s = _start_state(world, grid, graph, start, p_start)
    rng = build_mil_range(graph, provider, _states_for(graph, grid, orientations))
    engine = SpatialEngine(graph=graph, provider=provider, rng=rng, grid=grid)
    pois = tuple(n for n, _ in world.pois if n != start)
    try:
        res = dknn(DkNNQuery(st_s=st_s, k=k, budget=budget, pois=pois,
                             epsilon=epsilon), engine)
    except FewerThanK as exc:
        click.echo(f"only {len(exc.results)} feasible POIs", err=True)
        res = exc.results
    _write(out, "\n".join(f"{poi} length={p.length:.4f} cost={p.cost:.4f}"
                          for poi, p in res))


@main.command("range")
@click.option("--world", "world_path", required=True, type=click.Path(exists=True))
@click.option("--start", required=True)
@click.option("--p-start", default=None)
@click.option("--radius", default=10.0, type=float)
@click.option("--C", "budget", default=10.0, type=float)
@click.option("--epsilon", default=0.1, type=float)
@click.option("--out", default=None, type=click.Path())
def range_cmd(world_path, start, p_start, radius, budget, epsilon, out) -> None:
    """All POIs within a route-length radius under the budget."""
    world, grid, model = _load_world(world_path)
    gen, graph, provider, orientations = _context(world, grid, model)
    st_s = _start_state(world, grid, graph, start, p_start)
    rng = build_mil_range(graph, provider, _states_for(graph, grid, orientations))
    engine = SpatialEngine(graph=graph, provider=provider, rng=rng, grid=grid)
    pois = tuple(n for n, _ in world.pois if n != start)
    res = drange(DRQuery(st_s=st_s, radius=radius, budget=budget, pois=pois,
                         epsilon=epsilon), engine)
    _write(out, "\n".join(f"{poi} length={p.length:.4f} cost={p.cost:.4f}"
                          for poi, p in res))


@main.command("gen-maze")
@click.option("--width", default=25, type=int)
@click.option("--height", default=25, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, type=click.Path())
def gen_maze(width, height, seed, out) -> None:
    """Generate a perfect-maze world file."""
    gen = generate_maze(width, height, seed)
    _write(out, world_to_json(gen.world, gen.grid))


@main.command("gen-city")
@click.option("--pois", default=10, type=int)
@click.option("--open-ratio", default=0.6, type=float)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, type=click.Path())
def gen_city(pois, open_ratio, seed, out) -> None:
    """Generate a synthetic rectangular-block world file."""
    gen = generate_synthetic_city(pois, open_ratio, seed)
    _write(out, world_to_json(gen.world, gen.grid))


@main.command("mil-table")
@click.option("--world", "world_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, type=int)
@click.option("--out", default=None, type=click.Path())
def mil_table(world_path, seed, out) -> None:
    """Precompute and export the per-length cost-bound table as CSV."""
    world, grid, model = _load_world(world_path)
    gen, graph, provider, orientations = _context(world, grid, model)
    rng = build_mil_range(graph, provider, _states_for(graph, grid, orientations))
    _write(out, rng.to_csv())


@main.command()
@click.option("--world", "world_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def render(world_path, out) -> None:
    """Render the world (and optionally solved paths) to SVG."""
    world, grid, _ = _load_world(world_path)
    _write(out, export_paths_svg(world, grid, []))


if __name__ == "__main__":
    main()
