"""Path containers shared by solvers and baselines."""

from __future__ import annotations

from dataclasses import dataclass, field

from .kinematics import RWOperation
from .worlds import LocoState


@dataclass(frozen=True)
class OperationSequence:
    """Ordered operations realizing one loco-state transition."""

    ops: tuple[RWOperation, ...]
    total_cost: float


@dataclass
class RWPath:
    """A realized route: loco-state sequence with per-hop operations.

    length is the summed virtual edge length; cost is the summed per-hop
    minimum-incurred cost.
    """

    states: list[LocoState]
    length: float
    cost: float
    ops: list[OperationSequence] = field(default_factory=list)

    @property
    def v_nodes(self) -> list:
        return [st.v_loc for st in self.states]


class Infeasible(Exception):
    """No route satisfies the cost budget."""


class Unrealizable(Exception):
    """No collision-free operation sequence exists for a required step."""
