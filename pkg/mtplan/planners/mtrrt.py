"""
Multi-tree RRT.

Heuristic trees are spawned across free space and grown geometrically from the
samples the rooted tree cannot use. When a heuristic tree touches the rooted
tree through free space, a mixture laid along its branch from the contact
toward the goal steers the rooted tree's sampling for a bounded number of
draws, after which the heuristic tree is deleted. Heuristic trees that touch
each other are merged.

One iteration is one pass of the connect-nodes stage followed by the
connect-trees stage; merges and rejected contacts found in a pass belong to
it, and every guided draw is a pass of its own.
"""

import math
from dataclasses import dataclass
from typing import Optional

from ..forest import ConnectionEvent, farthest_node, merge_trees
from ..heuristics import GmmModel, SeededRng, fit_branch_gmm, spawn_heuristic_tree
from ..kinodynamics import State
from ..logging_config import get_logger
from ..workspace.grid import OccupancyGrid, Point, distance, segment_collision_free
from .base import BasePlanner, PlanContext, PlanResult, Query

logger = get_logger(__name__)


@dataclass
class GuidanceSession:
    """A heuristic tree currently steering the rooted tree."""

    tree_id: int
    model: GmmModel
    target: Point
    remaining: int
    draws: int = 0


class MTRRTPlanner(BasePlanner):
    """Rooted tree plus a forest of heuristic trees that guide it through a mixture sampler."""

    def __init__(self) -> None:
        self._session: Optional[GuidanceSession] = None

    @property
    def planner_id(self) -> str:
        return "mtrrt"

    def _connection_threshold(self, query: Query) -> Optional[float]:
        return query.planner.lambda_connect

    def _setup(self, ctx: PlanContext) -> None:
        self._session = None
        for _ in range(ctx.query.planner.n_init):
            self._spawn(ctx, None)

    def _spawn(self, ctx: PlanContext, at: Optional[Point]) -> int:
        tree = spawn_heuristic_tree(ctx.grid, ctx.rng, at=at, use_spatial_index=ctx.query.planner.use_spatial_index)
        tree_id = ctx.forest.add_tree(tree)
        ctx.counters.trees_spawned += 1
        ctx.record("spawn", tree=tree_id, h=tree.root.pos.h, v=tree.root.pos.v)
        logger.debug(
            f"Spawned heuristic tree {tree_id} at ({tree.root.pos.h:.1f}, {tree.root.pos.v:.1f})",
            extra={"planner": self.planner_id, "iteration": ctx.iteration, "tree": tree_id},
        )
        return tree_id

    def _step(self, ctx: PlanContext) -> Optional[int]:
        if self._session is not None:
            return self._guide(ctx)

        event = ctx.resolve_connection()
        if event is None:
            goal_index = self._connect_nodes(ctx)
            if goal_index is not None:
                return goal_index
            event = ctx.resolve_connection()
        return self._connect_trees(ctx, event)

    def _connect_nodes(self, ctx: PlanContext) -> Optional[int]:
        """Use one sample: grow the rooted tree, grow a nearby heuristic tree, or spawn a new one."""
        planner = ctx.query.planner
        x_rand = ctx.sample()
        d_rooted, _ = ctx.rooted.dist_to_tree(x_rand)
        if d_rooted < planner.lambda_attach:
            return ctx.extend_rooted(x_rand)

        hit = ctx.forest.proximity.nearest_within(x_rand, planner.lambda_attach)
        if hit is not None:
            d, tree_id, index = hit
            if d == 0.0:
                return None
            tree = ctx.forest.get(tree_id)
            parent = tree.nodes[index].pos
            if segment_collision_free(ctx.grid, parent, x_rand):
                heading = math.atan2(x_rand[1] - parent.v, x_rand[0] - parent.h)
                node = tree.add_node(State(Point(float(x_rand[0]), float(x_rand[1])), heading, 0.0, 0.0), index)
                ctx.record("add", tree=tree_id, node=node, parent=index)
                return None
        self._spawn(ctx, x_rand)
        return None

    def _connect_trees(self, ctx: PlanContext, event: Optional[ConnectionEvent]) -> Optional[int]:
        """Merge touching heuristic trees until the rooted tree is touched or no contact is left."""
        while event is not None:
            if event.involves_rooted:
                self._start_guidance(ctx, event)
                return self._guide(ctx)
            self._merge(ctx, event)
            event = ctx.resolve_connection()
        return None

    def _start_guidance(self, ctx: PlanContext, event: ConnectionEvent) -> None:
        planner = ctx.query.planner
        partner = ctx.forest.get(event.tree_b)
        end = partner.nearest_neighbor(ctx.query.goal)
        if ctx.rooted.dist_to_tree(partner.nodes[end].pos)[0] < planner.lambda_connect:
            # nothing of the partner lies ahead toward the goal; follow its longest branch instead
            end = farthest_node(partner, event.node_b)
        model = fit_branch_gmm(partner, event.node_b, end, planner.kappa_max, planner.sigma, max_nodes=planner.kappa_max)
        target = Point(float(model.means[-1][0]), float(model.means[-1][1]))
        self._session = GuidanceSession(event.tree_b, model, target, planner.guidance_budget)
        ctx.counters.guidance_sessions += 1
        ctx.record("guidance_start", tree=event.tree_b, kappa=model.kappa)
        logger.debug(
            f"Heuristic tree {event.tree_b} guides the rooted tree with {model.kappa} components",
            extra={"planner": self.planner_id, "iteration": ctx.iteration, "tree": event.tree_b},
        )

    def _guide(self, ctx: PlanContext) -> Optional[int]:
        session = self._session
        session.remaining -= 1
        session.draws += 1
        size = len(ctx.rooted)
        goal_index = ctx.extend_rooted(ctx.sample(session.model))
        if goal_index is not None:
            return goal_index
        reached = (
            len(ctx.rooted) > size
            and distance(ctx.rooted.nodes[-1].pos, session.target) < ctx.query.planner.lambda_connect
        )
        if reached or session.remaining <= 0:
            self._end_guidance(ctx)
        return None

    def _end_guidance(self, ctx: PlanContext) -> None:
        session = self._session
        self._session = None
        ctx.forest.remove_tree(session.tree_id)
        ctx.record("guidance_end", tree=session.tree_id, draws=session.draws)
        logger.debug(
            f"Heuristic tree {session.tree_id} deleted after {session.draws} guided draws",
            extra={"planner": self.planner_id, "iteration": ctx.iteration, "tree": session.tree_id},
        )

    def _merge(self, ctx: PlanContext, event: ConnectionEvent) -> None:
        # resolve_connection only reports pairs joined by a free segment
        merge_trees(ctx.forest, event, ctx.grid)
        ctx.counters.merges += 1
        ctx.record("merge", tree_a=event.tree_a, tree_b=event.tree_b)

    def _finish(self, ctx: PlanContext) -> None:
        if self._session is not None:
            self._end_guidance(ctx)


def plan_mtrrt(query: Query, grid: OccupancyGrid, rng: SeededRng) -> PlanResult:
    return MTRRTPlanner().plan(query, grid, rng)
