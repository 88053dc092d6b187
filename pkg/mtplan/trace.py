"""
Line-oriented planner traces: writing, parsing and invariant validation.

Format::

    mtplan-trace 1
    map builtin <name> | map file <path>
    query start <h> <v> <theta> goal <h> <v> radius <r> dt <dt> robot_radius <r>
    planner <id> seed <seed> success <true|false>
    tree <tree_id> <rooted|heuristic>
    node <id> <h> <v> <theta> <v> <omega> parent=<id|none>
    trajectory <node ids of the rooted tree, root first>
    event <iteration> <kind> key=value ...

Floats are written with ``repr`` so they parse back bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from .forest import ROOTED_TREE_ID, TreeKind
from .interfaces import MapFormatError
from .kinodynamics import ControlInput, State, propagate
from .planners.base import EVENT_KINDS, PlanResult, TraceEvent, in_goal_region
from .workspace.grid import OccupancyGrid, Point, segment_collision_free

TRACE_MAGIC = "mtplan-trace"
TRACE_VERSION = 1


@dataclass(frozen=True)
class MapRef:
    """Where the planned map came from: a builtin name or a file path."""

    kind: str
    ref: str

    def __post_init__(self) -> None:
        if self.kind not in ("builtin", "file"):
            raise ValueError(f"Map reference kind must be 'builtin' or 'file', got {self.kind!r}")


@dataclass
class TraceNode:
    node_id: int
    state: State
    parent: Optional[int]


@dataclass
class TraceTree:
    tree_id: int
    kind: TreeKind
    nodes: List[TraceNode] = field(default_factory=list)


@dataclass
class Trace:
    """Parsed contents of a trace file."""

    map_ref: MapRef
    start: State
    goal: Point
    goal_radius: float
    dt: float
    planner_id: str
    seed: int
    success: bool
    robot_radius: float = 0.0
    trees: Dict[int, TraceTree] = field(default_factory=dict)
    trajectory: List[int] = field(default_factory=list)
    events: List[TraceEvent] = field(default_factory=list)


def _fmt(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _value(token: str) -> Any:
    if token == "none":
        return None
    if token in ("true", "false"):
        return token == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def format_trace(result: PlanResult, map_ref: MapRef) -> List[str]:
    """Render a plan result as trace lines."""
    query = result.query
    start = query.start
    lines = [
        f"{TRACE_MAGIC} {TRACE_VERSION}",
        f"map {map_ref.kind} {map_ref.ref}",
        "query start {} {} {} goal {} {} radius {} dt {} robot_radius {}".format(
            _fmt(start.pos.h), _fmt(start.pos.v), _fmt(start.theta),
            _fmt(query.goal[0]), _fmt(query.goal[1]),
            _fmt(query.goal_radius), _fmt(query.params.dt), _fmt(query.planner.robot_radius),
        ),
        f"planner {result.planner_id} seed {result.seed} success {_fmt(result.success)}",
    ]
    for tree_id in result.forest.tree_ids:
        tree = result.forest.get(tree_id)
        lines.append(f"tree {tree_id} {tree.kind.value}")
        for index, (state, parent) in enumerate(zip(tree.nodes, tree.parents)):
            lines.append(
                f"node {index} {_fmt(state.pos.h)} {_fmt(state.pos.v)} {_fmt(state.theta)} "
                f"{_fmt(state.v)} {_fmt(state.omega)} parent={_fmt(parent)}"
            )
    lines.append("trajectory" + "".join(f" {index}" for index in result.trajectory_nodes))
    for event in result.events:
        details = "".join(f" {key}={_fmt(value)}" for key, value in event.fields)
        lines.append(f"event {event.iteration} {event.kind}{details}")
    return lines


def write_trace(result: PlanResult, path: Path, map_ref: MapRef) -> Path:
    """
    Write a trace file.

    Raises:
        OSError: If the file cannot be written (path included in the message)
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(format_trace(result, map_ref)) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to write trace {path}: {e}") from e
    return path


def _expect(tokens: List[str], position: int, word: str, line_no: int) -> None:
    if len(tokens) <= position or tokens[position] != word:
        raise MapFormatError(f"Expected {word!r} in trace record", line=line_no)


def parse_trace(text: str) -> Trace:
    """
    Parse trace text.

    Raises:
        MapFormatError: On any malformed record, with its line number
    """
    lines = text.splitlines()
    if not lines or lines[0].split() != [TRACE_MAGIC, str(TRACE_VERSION)]:
        raise MapFormatError(f"Missing '{TRACE_MAGIC} {TRACE_VERSION}' header", line=1)

    header: Dict[str, Any] = {}
    trees: Dict[int, TraceTree] = {}
    current: Optional[TraceTree] = None
    trajectory: List[int] = []
    events: List[TraceEvent] = []

    for line_no, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens:
            continue
        record = tokens[0]
        try:
            if record == "map":
                header["map_ref"] = MapRef(tokens[1], " ".join(tokens[2:]))
            elif record == "query":
                for position, word in ((1, "start"), (5, "goal"), (8, "radius"), (10, "dt")):
                    _expect(tokens, position, word, line_no)
                header["start"] = State(Point(float(tokens[2]), float(tokens[3])), float(tokens[4]))
                header["goal"] = Point(float(tokens[6]), float(tokens[7]))
                header["goal_radius"] = float(tokens[9])
                header["dt"] = float(tokens[11])
                if len(tokens) > 13 and tokens[12] == "robot_radius":
                    header["robot_radius"] = float(tokens[13])
            elif record == "planner":
                _expect(tokens, 2, "seed", line_no)
                _expect(tokens, 4, "success", line_no)
                header["planner_id"] = tokens[1]
                header["seed"] = int(tokens[3])
                header["success"] = tokens[5] == "true"
            elif record == "tree":
                current = TraceTree(int(tokens[1]), TreeKind(tokens[2]))
                if current.tree_id in trees:
                    raise MapFormatError(f"Duplicate tree {current.tree_id}", line=line_no)
                trees[current.tree_id] = current
            elif record == "node":
                if current is None:
                    raise MapFormatError("node record before any tree record", line=line_no)
                if len(tokens) != 8 or not tokens[7].startswith("parent="):
                    raise MapFormatError("node record needs 6 fields and parent=", line=line_no)
                h, v, theta, speed, omega = (float(t) for t in tokens[2:7])
                state = State(Point(h, v), theta, speed, omega)
                current.nodes.append(TraceNode(int(tokens[1]), state, _value(tokens[7][7:])))
            elif record == "trajectory":
                trajectory = [int(t) for t in tokens[1:]]
            elif record == "event":
                fields = tuple((key, _value(raw)) for key, _, raw in (t.partition("=") for t in tokens[3:]))
                events.append(TraceEvent(int(tokens[1]), tokens[2], fields))
            else:
                raise MapFormatError(f"Unknown trace record {record!r}", line=line_no)
        except (IndexError, ValueError) as e:
            raise MapFormatError(f"Malformed {record} record: {e}", line=line_no) from e

    required = ("map_ref", "start", "goal", "goal_radius", "dt", "planner_id", "seed", "success")
    missing = [key for key in required if key not in header]
    if missing:
        raise MapFormatError(f"Trace is missing records for {missing}")
    return Trace(trees=trees, trajectory=trajectory, events=events, **header)


def read_trace(path: Path) -> Trace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def _check_trees(trace: Trace, grid: OccupancyGrid) -> List[str]:
    violations = []
    rooted = trace.trees.get(ROOTED_TREE_ID)
    if rooted is None or rooted.kind is not TreeKind.ROOTED:
        violations.append(f"tree {ROOTED_TREE_ID} must be the rooted tree")
    elif not rooted.nodes or tuple(rooted.nodes[0].state.pos) != tuple(trace.start.pos):
        violations.append("rooted tree root is not the query start")
    for tree in trace.trees.values():
        if tree.tree_id != ROOTED_TREE_ID and tree.kind is not TreeKind.HEURISTIC:
            violations.append(f"tree {tree.tree_id}: second rooted tree")
        for position, node in enumerate(tree.nodes):
            if node.node_id != position:
                violations.append(f"tree {tree.tree_id}: node {node.node_id} listed at position {position}")
            if position == 0:
                if node.parent is not None:
                    violations.append(f"tree {tree.tree_id}: root has parent {node.parent}")
                continue
            if node.parent is None:
                violations.append(f"tree {tree.tree_id}: node {position} is a second root")
            elif not 0 <= node.parent < position:
                violations.append(f"tree {tree.tree_id}: node {position} has parent {node.parent} (must precede it)")
            elif not segment_collision_free(grid, tree.nodes[node.parent].state.pos, node.state.pos):
                violations.append(f"tree {tree.tree_id}: edge {node.parent}->{position} collides")
    return violations


def _check_trajectory(trace: Trace, grid: OccupancyGrid) -> List[str]:
    if not trace.success:
        return ["failed plan lists a trajectory"] if trace.trajectory else []
    rooted = trace.trees.get(ROOTED_TREE_ID)
    if rooted is None or not trace.trajectory:
        return ["successful plan has no trajectory"]
    violations = []
    if any(not 0 <= index < len(rooted.nodes) for index in trace.trajectory):
        return ["trajectory references nodes outside the rooted tree"]
    if trace.trajectory[0] != 0:
        violations.append("trajectory does not start at the rooted tree's root")
    last = rooted.nodes[trace.trajectory[-1]].state
    if not in_goal_region(last, trace.goal, trace.goal_radius):
        violations.append("trajectory does not end in the goal region")
    for parent_id, child_id in zip(trace.trajectory, trace.trajectory[1:]):
        parent = rooted.nodes[parent_id].state
        child = rooted.nodes[child_id]
        if child.parent != parent_id:
            violations.append(f"trajectory step {parent_id}->{child_id} is not a tree edge")
            continue
        if not segment_collision_free(grid, parent.pos, child.state.pos):
            violations.append(f"trajectory step {parent_id}->{child_id} collides")
        replayed = propagate(parent, ControlInput(child.state.v, child.state.omega), trace.dt)
        if replayed != child.state:
            violations.append(f"trajectory step {parent_id}->{child_id} is not reproduced by propagate")
    return violations


def _check_lifecycle(trace: Trace) -> List[str]:
    """Every guiding heuristic tree must be closed and absent from the final forest."""
    violations = []
    open_sessions: Dict[int, int] = {}
    guided = set()
    for event in trace.events:
        if event.kind not in EVENT_KINDS:
            violations.append(f"iteration {event.iteration}: unknown event kind {event.kind!r}")
        elif event.kind == "guidance_start":
            open_sessions[event.get("tree")] = event.iteration
            guided.add(event.get("tree"))
        elif event.kind == "guidance_end":
            if open_sessions.pop(event.get("tree"), None) is None:
                violations.append(
                    f"iteration {event.iteration}: guidance_end for tree {event.get('tree')} without a start"
                )
    for tree_id, iteration in open_sessions.items():
        violations.append(f"guidance by tree {tree_id} started at iteration {iteration} never ended")
    for tree_id in sorted(guided & set(trace.trees)):
        violations.append(f"guiding tree {tree_id} survives in the final forest")
    return violations


def validate_trace(trace: Trace, grid: OccupancyGrid) -> List[str]:
    """
    Re-check a trace against the tree, trajectory and heuristic-tree lifecycle invariants.

    The lifecycle check applies to planners that delete their guiding trees (mtrrt).

    Returns:
        Violations; empty when the trace is consistent
    """
    violations = _check_trees(trace, grid) + _check_trajectory(trace, grid)
    if trace.planner_id == "mtrrt":
        violations += _check_lifecycle(trace)
    return violations


def trace_trajectory_states(trace: Trace) -> List[State]:
    """States of the trajectory listed in the trace, root first."""
    rooted = trace.trees.get(ROOTED_TREE_ID)
    if rooted is None:
        return []
    return [rooted.nodes[index].state for index in trace.trajectory]


__all__ = [
    "MapRef",
    "Trace",
    "TraceNode",
    "TraceTree",
    "format_trace",
    "parse_trace",
    "read_trace",
    "trace_trajectory_states",
    "validate_trace",
    "write_trace",
]
