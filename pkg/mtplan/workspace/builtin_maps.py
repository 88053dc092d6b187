"""Deterministic 450x350 benchmark environments: room, clutter and maze.

The layouts are procedural stand-ins with the qualitative structure of the
three comparison environments; every constant below fixes the geometry, so the
same name always yields the same grid and query.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from ..interfaces import UnknownMapError
from .grid import OccupancyGrid, Point

MAP_WIDTH = 450
MAP_HEIGHT = 350
WALL = 6

# clutter: jittered 8x5 lattice of blocks, 56x70 px lattice cells
CLUTTER_SEED = 2022
CLUTTER_COLS = 8
CLUTTER_ROWS = 5
CLUTTER_PITCH = (56, 70)
CLUTTER_MARGIN = (12, 8)  # free margin before / after a block inside its lattice cell

# maze: perfect maze over 9x7 cells of 50 px
MAZE_SEED = 7
MAZE_CELL = 50
MAZE_COLS = MAP_WIDTH // MAZE_CELL
MAZE_ROWS = MAP_HEIGHT // MAZE_CELL


@dataclass(frozen=True)
class BuiltinMap:
    """A benchmark environment with its fixed query."""

    name: str
    grid: OccupancyGrid
    start: Point
    goal: Point
    start_heading: float = 0.0


def _blank() -> np.ndarray:
    return np.zeros((MAP_HEIGHT, MAP_WIDTH), dtype=bool)


def _fill(cells: np.ndarray, h0: int, v0: int, h1: int, v1: int, value: bool = True) -> None:
    """Set the half-open rectangle [h0, h1) x [v0, v1), clipped to the map."""
    h0, h1 = max(h0, 0), min(h1, cells.shape[1])
    v0, v1 = max(v0, 0), min(v1, cells.shape[0])
    if h0 < h1 and v0 < v1:
        cells[v0:v1, h0:h1] = value


def _border(cells: np.ndarray) -> None:
    _fill(cells, 0, 0, MAP_WIDTH, WALL)
    _fill(cells, 0, MAP_HEIGHT - WALL, MAP_WIDTH, MAP_HEIGHT)
    _fill(cells, 0, 0, WALL, MAP_HEIGHT)
    _fill(cells, MAP_WIDTH - WALL, 0, MAP_WIDTH, MAP_HEIGHT)


def build_room() -> BuiltinMap:
    """Six rooms (3 x 2) joined by 40 px doors; the route needs several turns."""
    cells = _blank()
    _border(cells)
    half = WALL // 2
    for x in (150, 300):
        _fill(cells, x - half, 0, x + half, MAP_HEIGHT)
    _fill(cells, 0, 175 - half, MAP_WIDTH, 175 + half)

    doors: List[Tuple[int, int, int, int]] = [
        (150 - half, 40, 150 + half, 80),     # top-left <-> top-middle
        (300 - half, 260, 300 + half, 300),   # bottom-middle <-> bottom-right
        (60, 175 - half, 100, 175 + half),    # left column
        (200, 175 - half, 240, 175 + half),   # middle column
        (360, 175 - half, 400, 175 + half),   # right column
    ]
    for h0, v0, h1, v1 in doors:
        _fill(cells, h0, v0, h1, v1, value=False)

    return BuiltinMap("room", OccupancyGrid(cells), start=Point(40.0, 300.0), goal=Point(410.0, 60.0))


def build_clutter() -> BuiltinMap:
    """Forty rectangular blocks on a jittered lattice with corridors of at least 20 px."""
    cells = _blank()
    rng = np.random.Generator(np.random.PCG64(CLUTTER_SEED))
    pitch_h, pitch_v = CLUTTER_PITCH
    before, after = CLUTTER_MARGIN
    for row in range(CLUTTER_ROWS):
        for col in range(CLUTTER_COLS):
            width = int(rng.integers(18, 31))
            height = int(rng.integers(20, 37))
            slack_h = pitch_h - before - after - width
            slack_v = pitch_v - before - after - height
            h0 = col * pitch_h + before + int(rng.integers(0, slack_h + 1))
            v0 = row * pitch_v + before + int(rng.integers(0, slack_v + 1))
            _fill(cells, h0, v0, h0 + width, v0 + height)

    return BuiltinMap("clutter", OccupancyGrid(cells), start=Point(6.0, 6.0), goal=Point(444.0, 344.0))


def _maze_passages() -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Carve a perfect maze with an iterative randomized depth-first search."""
    rng = np.random.Generator(np.random.PCG64(MAZE_SEED))
    visited = np.zeros((MAZE_ROWS, MAZE_COLS), dtype=bool)
    stack = [(0, 0)]
    visited[0, 0] = True
    passages = []
    while stack:
        col, row = stack[-1]
        neighbours = [
            (col + dc, row + dr)
            for dc, dr in ((1, 0), (-1, 0), (0, 1), (0, -1))
            if 0 <= col + dc < MAZE_COLS and 0 <= row + dr < MAZE_ROWS and not visited[row + dr, col + dc]
        ]
        if not neighbours:
            stack.pop()
            continue
        nxt = neighbours[int(rng.integers(len(neighbours)))]
        visited[nxt[1], nxt[0]] = True
        passages.append(((col, row), nxt))
        stack.append(nxt)
    return passages


def build_maze() -> BuiltinMap:
    """Corridor maze with dead ends; corridors are 44 px wide between 6 px walls."""
    cells = _blank()
    half = WALL // 2
    for k in range(MAZE_COLS + 1):
        x = k * MAZE_CELL
        _fill(cells, x - half, 0, x + half, MAP_HEIGHT)
    for k in range(MAZE_ROWS + 1):
        y = k * MAZE_CELL
        _fill(cells, 0, y - half, MAP_WIDTH, y + half)

    for (c0, r0), (c1, r1) in _maze_passages():
        if r0 == r1:
            x = max(c0, c1) * MAZE_CELL
            _fill(cells, x - half, r0 * MAZE_CELL + half, x + half, (r0 + 1) * MAZE_CELL - half, value=False)
        else:
            y = max(r0, r1) * MAZE_CELL
            _fill(cells, c0 * MAZE_CELL + half, y - half, (c0 + 1) * MAZE_CELL - half, y + half, value=False)

    centre = MAZE_CELL / 2
    return BuiltinMap(
        "maze",
        OccupancyGrid(cells),
        start=Point(centre, centre),
        goal=Point(MAP_WIDTH - centre, MAP_HEIGHT - centre),
    )


_BUILDERS = {
    "room": build_room,
    "clutter": build_clutter,
    "maze": build_maze,
}

BUILTIN_NAMES = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def load_builtin(name: str) -> BuiltinMap:
    """
    Return a builtin environment together with its fixed query.

    Raises:
        UnknownMapError: If the name is not one of room, clutter, maze
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownMapError(f"Unknown builtin map {name!r}; expected one of {list(_BUILDERS)}") from None
    return builder()


def builtin_map(name: str) -> OccupancyGrid:
    """Return the 450x350 grid of a builtin environment."""
    return load_builtin(name).grid


def builtin_queries() -> Dict[str, Tuple[Point, Point]]:
    """Map each builtin name to its (start, goal) pair."""
    return {name: (load_builtin(name).start, load_builtin(name).goal) for name in _BUILDERS}
