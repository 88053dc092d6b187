"""Planners: kinodynamic RRT, the bidirectional B2U baseline and multi-tree MT-RRT."""

from typing import Dict, Type

from .b2u import B2URRTPlanner, plan_b2u, steer_geometric
from .base import (
    EVENT_KINDS,
    BasePlanner,
    PlanContext,
    PlanCounters,
    PlanResult,
    Query,
    TraceEvent,
    extract_trajectory,
    in_goal_region,
    trajectory_length,
)
from .mtrrt import MTRRTPlanner, plan_mtrrt
from .rrt import RRTPlanner, plan_rrt

PLANNERS: Dict[str, Type[BasePlanner]] = {
    "rrt": RRTPlanner,
    "b2u": B2URRTPlanner,
    "mtrrt": MTRRTPlanner,
}


def create_planner(planner_id: str) -> BasePlanner:
    """
    Instantiate a planner by id.

    Raises:
        ValueError: If the id is not registered
    """
    try:
        return PLANNERS[planner_id]()
    except KeyError:
        raise ValueError(f"Unknown planner {planner_id!r}; expected one of {list(PLANNERS)}") from None


__all__ = [
    "B2URRTPlanner",
    "BasePlanner",
    "EVENT_KINDS",
    "MTRRTPlanner",
    "PLANNERS",
    "PlanContext",
    "PlanCounters",
    "PlanResult",
    "Query",
    "RRTPlanner",
    "TraceEvent",
    "create_planner",
    "extract_trajectory",
    "in_goal_region",
    "plan_b2u",
    "plan_mtrrt",
    "plan_rrt",
    "steer_geometric",
    "trajectory_length",
]
