"""SVG rendering of a map, a forest snapshot and a trajectory."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from jinja2 import Environment, PackageLoader, StrictUndefined

from ..forest import Forest, TreeKind
from ..kinodynamics import State
from ..workspace.grid import OccupancyGrid

COLORS = {
    TreeKind.ROOTED.value: "#ff8c00",
    TreeKind.HEURISTIC.value: "#1f5fff",
    "trajectory": "#e00000",
    "start": "#e00000",
    "goal": "#00a000",
}

_environment = Environment(
    loader=PackageLoader("mtplan", "templates"),
    autoescape=True,
    undefined=StrictUndefined,
    keep_trailing_newline=True,
)


def _num(x: float) -> str:
    return f"{x:.3f}"


def obstacle_runs(grid: OccupancyGrid) -> List[Tuple[int, int, int]]:
    """Horizontal runs of occupied cells as (h, v, length), row by row."""
    runs = []
    for v, row in enumerate(grid.array):
        padded = np.concatenate(([False], row, [False])).astype(np.int8)
        changes = np.flatnonzero(np.diff(padded))
        for begin, end in zip(changes[::2], changes[1::2]):
            runs.append((int(begin), v, int(end - begin)))
    return runs


def _edges(forest: Optional[Forest]) -> List[Dict[str, str]]:
    if forest is None:
        return []
    edges = []
    for tree in forest.trees():
        kind = tree.kind.value
        for parent, child in tree.edges():
            a, b = tree.nodes[parent].pos, tree.nodes[child].pos
            edges.append({
                "kind": kind, "color": COLORS[kind],
                "x1": _num(a.h), "y1": _num(a.v), "x2": _num(b.h), "y2": _num(b.v),
            })
    return edges


def render_svg_text(
    grid: OccupancyGrid,
    forest: Optional[Forest] = None,
    trajectory: Sequence[State] = (),
    start: Optional[Tuple[float, float]] = None,
    goal: Optional[Tuple[float, float]] = None,
) -> str:
    """
    Render the SVG document: obstacles black on white, rooted edges orange,
    heuristic edges blue, trajectory red, start red and goal green. One SVG
    unit is one pixel.
    """
    points = " ".join(f"{_num(s.pos.h)},{_num(s.pos.v)}" for s in trajectory) if len(trajectory) > 1 else ""
    return _environment.get_template("forest.svg.j2").render(
        width=grid.width,
        height=grid.height,
        obstacles=obstacle_runs(grid),
        edges=_edges(forest),
        trajectory=points,
        start=(_num(start[0]), _num(start[1])) if start is not None else None,
        goal=(_num(goal[0]), _num(goal[1])) if goal is not None else None,
        colors=COLORS,
    )


def render_svg(
    grid: OccupancyGrid,
    forest: Optional[Forest],
    trajectory: Sequence[State],
    path: Path,
    start: Optional[Tuple[float, float]] = None,
    goal: Optional[Tuple[float, float]] = None,
) -> Path:
    """
    Write the SVG rendering to ``path``.

    Raises:
        OSError: If the file cannot be written (path included in the message)
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_svg_text(grid, forest, trajectory, start, goal), encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to write SVG {path}: {e}") from e
    return path
