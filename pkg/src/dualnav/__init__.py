"""Dual-world constrained shortest-path planning for redirected walking.

The package models a virtual environment (polygonal obstacle world with a
visibility graph) entangled with a physical room (occupancy grid).  A route
is a sequence of joint virtual/physical poses; each hop is realized by
redirection operations (gain-scaled translation, rotation, curvature, or a
reset) whose perceptual cost is charged against a budget.  Solvers find the
shortest virtual route whose total redirection cost stays within budget.
"""

from .approx import rounded_dp
from .baselines import cola_estimated, ksp_reset, mcp, yen_k_shortest
from .dewn import DewnDetails, DewnOptions, dewn, hop_diameter
from .exact import DROPQuery, KnapsackInstance, basic_dp, kp_to_drop
from .harness import (
    GeneratedWorld,
    InvalidRatio,
    RunReport,
    RunRow,
    Scenario,
    generate_maze,
    generate_synthetic_city,
    kinematic_scenario,
    measured_open_ratio,
    run_matrix,
)
from .kinematics import (
    CostModel,
    Collision,
    OutOfWorld,
    RWOperation,
    Worlds,
    apply_operation,
    operation_cost,
)
from .mil import (
    KinematicMILProvider,
    MILProvider,
    MILRange,
    NotNeighbors,
    TableMILProvider,
    aggregate_bounds,
    bin_length,
    build_mil_range,
    compute_mil,
    greedy_realize,
)
from .paths import Infeasible, OperationSequence, RWPath, Unrealizable
from .pruning import PruneResult, ppnp_search
from .render import export_paths_svg
from .search import (
    HeuristicTables,
    ReferenceNotFound,
    build_heuristics,
    generate_reference,
    idws,
)
from .simplify import MultiplierResult, csms
from .spatial import DkNNQuery, DRQuery, FewerThanK, SpatialEngine, dknn, drange
from .worlds import (
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

__version__ = "0.1.0"
