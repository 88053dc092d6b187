"""Single-tree kinodynamic RRT."""

from typing import Optional

from ..heuristics import SeededRng
from ..workspace.grid import OccupancyGrid
from .base import BasePlanner, PlanContext, PlanResult, Query


class RRTPlanner(BasePlanner):
    """Uniform (goal-biased) sampling, one extension of the rooted tree per iteration."""

    @property
    def planner_id(self) -> str:
        return "rrt"

    def _step(self, ctx: PlanContext) -> Optional[int]:
        return ctx.extend_rooted(ctx.sample())


def plan_rrt(query: Query, grid: OccupancyGrid, rng: SeededRng) -> PlanResult:
    return RRTPlanner().plan(query, grid, rng)
