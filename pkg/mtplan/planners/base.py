"""Query and result types plus the planning loop shared by every planner."""

from __future__ import annotations

import math
import time
from abc import abstractmethod
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..config_models import KinodynamicParams, PlannerParams
from ..forest import ROOTED_TREE_ID, ConnectionEvent, Forest, Tree, TreeKind
from ..heuristics import GmmModel, SeededRng, random_state, sample_heuristic_state
from ..interfaces import ForestInvariantError, InvalidQueryError, Planner
from ..kinodynamics import State, extend
from ..logging_config import get_logger
from ..workspace.grid import OccupancyGrid, Point, distance, inflate, is_free

logger = get_logger(__name__)


@dataclass(frozen=True)
class Query:
    """A start state, a goal point and every parameter the planners read."""

    start: State
    goal: Point
    params: KinodynamicParams = field(default_factory=KinodynamicParams)
    planner: PlannerParams = field(default_factory=PlannerParams)

    @property
    def goal_radius(self) -> float:
        return self.planner.goal_radius

    @property
    def max_iterations(self) -> int:
        return self.planner.max_iterations

    def validate(self, grid: OccupancyGrid) -> None:
        """
        Check the query against a grid.

        Raises:
            InvalidQueryError: If start or goal is not in free space
        """
        if not is_free(grid, self.start.pos):
            raise InvalidQueryError(f"Start {tuple(self.start.pos)} is not in free space")
        if not is_free(grid, self.goal):
            raise InvalidQueryError(f"Goal {tuple(self.goal)} is not in free space")


@dataclass
class PlanCounters:
    """Per-trial counters; all monotone during a run."""

    iterations: int = 0
    invalid_connections: int = 0
    wall_time: float = 0.0
    candidates_evaluated: int = 0
    extensions: int = 0
    trees_spawned: int = 0
    merges: int = 0
    guidance_sessions: int = 0
    heuristic_samples: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TraceEvent:
    """One planner event: iteration, kind and key/value details."""

    iteration: int
    kind: str
    fields: Tuple[Tuple[str, Any], ...] = ()

    def get(self, key: str, default: Any = None) -> Any:
        return dict(self.fields).get(key, default)


EVENT_KINDS = (
    "spawn", "add", "connect", "connect_rejected", "merge", "merge_rejected",
    "guidance_start", "guidance_end", "goal",
)


@dataclass
class PlanResult:
    """Outcome of one trial."""

    planner_id: str
    seed: int
    success: bool
    trajectory: List[State]
    counters: PlanCounters
    forest: Forest
    query: Query
    trajectory_nodes: List[int] = field(default_factory=list)
    events: List[TraceEvent] = field(default_factory=list)

    @property
    def trajectory_length(self) -> float:
        return trajectory_length(self.trajectory) if self.trajectory else math.nan

    def metrics(self) -> Dict[str, Any]:
        """Flat summary used by the CLI and the benchmark records."""
        return {
            "planner": self.planner_id,
            "seed": self.seed,
            "success": self.success,
            "time_s": self.counters.wall_time,
            "traj_len_px": self.trajectory_length if self.success else None,
            "invalid_connections": self.counters.invalid_connections,
            "iterations": self.counters.iterations,
            "counters": self.counters.to_dict(),
            "trajectory": [[s.pos.h, s.pos.v, s.theta, s.v, s.omega] for s in self.trajectory],
        }


def in_goal_region(x: State, goal: Tuple[float, float], r: float) -> bool:
    """True iff x lies in the closed ball of radius r around goal."""
    return distance(x.pos, goal) <= r


def extract_trajectory(tree: Tree, leaf: int) -> List[State]:
    """
    Root-first states from the root down to ``leaf``.

    Raises:
        InvalidNodeError: If leaf is not a node of the tree
    """
    return [tree.nodes[index] for index in reversed(tree.path_to_root(leaf))]


def trajectory_length(traj: Sequence[State]) -> float:
    """Sum of Euclidean segment lengths between consecutive positions."""
    if not traj:
        raise ValueError("Trajectory must contain at least one state")
    return math.fsum(distance(a.pos, b.pos) for a, b in zip(traj, traj[1:]))


class PlanContext:
    """Mutable state of one trial: forest, random source, counters and event log."""

    def __init__(self, query: Query, grid: OccupancyGrid, rng: SeededRng, forest: Forest):
        self.query = query
        self.grid = grid
        self.rng = rng
        self.forest = forest
        self.counters = PlanCounters()
        self.events: List[TraceEvent] = []
        self.iteration = 0

    @property
    def rooted(self) -> Tree:
        return self.forest.rooted

    def record(self, kind: str, **fields: Any) -> None:
        self.events.append(TraceEvent(self.iteration, kind, tuple(fields.items())))

    def sample(self, model: Optional[GmmModel] = None) -> Point:
        """
        Next x_rand: the goal with probability goal_bias, else a heuristic draw
        from ``model`` when given, else a uniform free point.
        """
        bias = self.query.planner.goal_bias
        if bias > 0.0 and self.rng.random() < bias:
            return self.query.goal
        if model is not None:
            self.counters.heuristic_samples += 1
            return sample_heuristic_state(model, self.grid, self.rng, self.query.planner.rejection_cap)
        return random_state(self.grid, self.rng)

    def resolve_connection(self) -> Optional[ConnectionEvent]:
        """
        Next tree contact whose connecting segment is free.

        Node pairs that only touch across an obstacle are excluded on the way and
        recorded as ``connect_rejected`` (rooted tree) or ``merge_rejected``.
        """
        rejected: List[ConnectionEvent] = []
        event = self.forest.first_free_connection(self.grid, rejected)
        for miss in rejected:
            self.record(
                "connect_rejected" if miss.involves_rooted else "merge_rejected",
                tree_a=miss.tree_a, tree_b=miss.tree_b, node_a=miss.node_a, node_b=miss.node_b,
            )
        if event is not None:
            self.record(
                "connect", tree_a=event.tree_a, tree_b=event.tree_b,
                node_a=event.node_a, node_b=event.node_b, distance=event.distance,
            )
        return event

    def extend_rooted(self, x_rand: Tuple[float, float]) -> Optional[int]:
        """
        Kinodynamic extension of the rooted tree.

        Returns:
            Index of the new node when it lies in the goal region, else None
        """
        tree = self.rooted
        new_state = extend(
            tree, x_rand, self.grid, self.query.params, self.counters,
            start=self.query.start.pos, goal=self.query.goal,
        )
        if new_state is None:
            return None
        self.counters.extensions += 1
        index = len(tree) - 1
        self.record("add", tree=ROOTED_TREE_ID, node=index, parent=tree.parents[index])
        if in_goal_region(new_state, self.query.goal, self.query.goal_radius):
            return index
        return None


class BasePlanner(Planner):
    """
    Shared planning loop.

    Every pass of the loop counts one iteration. Subclasses implement ``_step``
    and may override ``_setup``, ``_connection_threshold`` and ``_finish``.
    """

    @property
    @abstractmethod
    def planner_id(self) -> str:
        """Short identifier."""

    def _connection_threshold(self, query: Query) -> Optional[float]:
        """Threshold for the forest's proximity index; None disables it."""
        return None

    def _setup(self, ctx: PlanContext) -> None:
        """Prepare planner state before the first iteration."""

    @abstractmethod
    def _step(self, ctx: PlanContext) -> Optional[int]:
        """Run one iteration; return the rooted node index that reached the goal, if any."""

    def _finish(self, ctx: PlanContext) -> None:
        """Release planner state after the loop ends."""

    def plan(self, query: Query, grid: OccupancyGrid, rng: SeededRng) -> PlanResult:
        """
        Solve one query.

        Args:
            query: Start, goal and parameters
            grid: Occupancy grid; inflated by robot_radius when that is positive
            rng: Random source owned by this trial

        Returns:
            PlanResult; exhausting max_iterations yields success=False

        Raises:
            InvalidQueryError: If start or goal is not free
            ForestInvariantError: If debug_audit is on and an invariant breaks
        """
        grid = inflate(grid, query.planner.robot_radius)
        query.validate(grid)

        rooted = Tree(query.start, TreeKind.ROOTED, use_spatial_index=query.planner.use_spatial_index)
        forest = Forest(rooted, lambda_connect=self._connection_threshold(query))
        ctx = PlanContext(query, grid, rng, forest)
        log_extra = {"planner": self.planner_id, "seed": rng.seed}
        logger.info(f"Planning with {self.planner_id} (seed {rng.seed})", extra=log_extra)

        started = time.perf_counter()
        goal_index: Optional[int] = None
        if in_goal_region(query.start, query.goal, query.goal_radius):
            goal_index = 0
        else:
            self._setup(ctx)
            self._audit(ctx)
            while ctx.counters.iterations < query.max_iterations:
                ctx.counters.iterations += 1
                ctx.iteration = ctx.counters.iterations
                goal_index = self._step(ctx)
                if goal_index is not None:
                    ctx.record("goal", node=goal_index)
                    break
                self._audit(ctx)
            self._finish(ctx)
            self._audit(ctx)
        ctx.counters.wall_time = time.perf_counter() - started

        success = goal_index is not None
        trajectory = extract_trajectory(rooted, goal_index) if success else []
        nodes = list(reversed(rooted.path_to_root(goal_index))) if success else []
        result = PlanResult(
            planner_id=self.planner_id,
            seed=rng.seed,
            success=success,
            trajectory=trajectory,
            counters=ctx.counters,
            forest=forest,
            query=query,
            trajectory_nodes=nodes,
            events=ctx.events,
        )
        if success:
            logger.info(
                f"{self.planner_id} reached the goal after {ctx.counters.iterations} iterations "
                f"({ctx.counters.wall_time:.3f}s, length {result.trajectory_length:.1f}px)",
                extra={**log_extra, "iteration": ctx.counters.iterations},
            )
        else:
            logger.info(
                f"{self.planner_id} failed after {ctx.counters.iterations} iterations",
                extra={**log_extra, "iteration": ctx.counters.iterations},
            )
        return result

    def _audit(self, ctx: PlanContext) -> None:
        if not ctx.query.planner.debug_audit:
            return
        violations = ctx.forest.audit(ctx.grid, start=ctx.query.start.pos)
        if violations:
            raise ForestInvariantError(
                f"Forest audit failed at iteration {ctx.iteration}: " + "; ".join(violations)
            )


__all__ = [
    "BasePlanner",
    "EVENT_KINDS",
    "PlanContext",
    "PlanCounters",
    "PlanResult",
    "Query",
    "TraceEvent",
    "extract_trajectory",
    "in_goal_region",
    "trajectory_length",
]
