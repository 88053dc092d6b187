"""
Bidirectional baseline: a kinodynamic tree from the start and a geometric tree
from the goal. Once the two come within the connection threshold and the gap
between them is free, the goal tree is frozen, a mixture is fitted along its
branch from the contact back to the goal, and the rooted tree samples from that
mixture for the rest of the run.
"""

import math
from typing import Optional

from ..forest import Tree, TreeKind
from ..heuristics import GmmModel, SeededRng, fit_branch_gmm, random_state
from ..kinodynamics import State
from ..logging_config import get_logger
from ..workspace.grid import OccupancyGrid, Point, distance, segment_collision_free
from .base import BasePlanner, PlanContext, PlanResult, Query

logger = get_logger(__name__)


def steer_geometric(tree: Tree, x_rand: Point, step: float, grid: OccupancyGrid) -> Optional[int]:
    """
    Straight-line RRT extension: move at most ``step`` px from the nearest node toward x_rand.

    Returns:
        Index of the added node, or None if the sample coincides with the
        nearest node or the segment collides
    """
    near = tree.nearest_neighbor(x_rand)
    origin = tree.nodes[near].pos
    d = distance(origin, x_rand)
    if d == 0.0:
        return None
    heading = math.atan2(x_rand[1] - origin.v, x_rand[0] - origin.h)
    if d <= step:
        target = Point(float(x_rand[0]), float(x_rand[1]))
    else:
        target = Point(origin.h + step * math.cos(heading), origin.v + step * math.sin(heading))
    if not segment_collision_free(grid, origin, target):
        return None
    return tree.add_node(State(target, heading, 0.0, 0.0), near)


class B2URRTPlanner(BasePlanner):
    """Bidirectional tree growth that switches to mixture-guided sampling on contact."""

    def __init__(self) -> None:
        self._goal_tree_id: Optional[int] = None
        self._model: Optional[GmmModel] = None

    @property
    def planner_id(self) -> str:
        return "b2u"

    def _connection_threshold(self, query: Query) -> Optional[float]:
        return query.planner.lambda_connect

    def _setup(self, ctx: PlanContext) -> None:
        self._model = None
        goal_tree = Tree(
            State(ctx.query.goal), TreeKind.HEURISTIC, use_spatial_index=ctx.query.planner.use_spatial_index
        )
        self._goal_tree_id = ctx.forest.add_tree(goal_tree)
        ctx.counters.trees_spawned += 1
        ctx.record("spawn", tree=self._goal_tree_id, h=goal_tree.root.pos.h, v=goal_tree.root.pos.v)

    def _step(self, ctx: PlanContext) -> Optional[int]:
        if self._model is not None:
            return ctx.extend_rooted(ctx.sample(self._model))

        goal_index = None
        if ctx.iteration % 2 == 1:
            goal_index = ctx.extend_rooted(ctx.sample())
        else:
            goal_tree = ctx.forest.get(self._goal_tree_id)
            x_rand = random_state(ctx.grid, ctx.rng)
            index = steer_geometric(goal_tree, x_rand, ctx.query.planner.goal_tree_step, ctx.grid)
            if index is not None:
                ctx.record("add", tree=self._goal_tree_id, node=index, parent=goal_tree.parents[index])
        if goal_index is not None:
            return goal_index

        event = ctx.resolve_connection()
        if event is not None:
            planner = ctx.query.planner
            # the goal tree's branch from the contact back to the goal
            self._model = fit_branch_gmm(
                ctx.forest.get(event.tree_b), event.node_b, 0, planner.kappa_max, planner.sigma
            )
            ctx.counters.guidance_sessions += 1
            ctx.record("guidance_start", tree=event.tree_b, kappa=self._model.kappa)
            logger.debug(
                f"Goal tree met the rooted tree at iteration {ctx.iteration}; "
                f"guiding with {self._model.kappa} components",
                extra={"planner": self.planner_id, "iteration": ctx.iteration},
            )
        return None


def plan_b2u(query: Query, grid: OccupancyGrid, rng: SeededRng) -> PlanResult:
    return B2URRTPlanner().plan(query, grid, rng)
