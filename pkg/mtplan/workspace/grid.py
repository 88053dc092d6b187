"""Occupancy grids and collision predicates."""

from __future__ import annotations

import math
from typing import Iterable, List, NamedTuple, Optional, Set, Tuple

import numpy as np
from scipy import ndimage

# Sub-pixel pitch used when sampling a segment for collisions.
SEGMENT_SPACING = 0.5


class Point(NamedTuple):
    """Continuous workspace position in pixels."""

    h: float
    v: float


def distance(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    """Euclidean distance; the same expression is used by every vectorised scan."""
    dh = a[0] - b[0]
    dv = a[1] - b[1]
    return math.sqrt(dh * dh + dv * dv)


class OccupancyGrid:
    """
    Immutable rasterized workspace.

    Cells are stored row-major as a ``(height, width)`` boolean array where
    ``True`` marks an obstacle. Cell ``(h, v)`` covers ``[h, h+1) x [v, v+1)``.
    """

    __slots__ = ("_cells", "_free_count")

    def __init__(self, cells: np.ndarray):
        """
        Initialize the grid from a boolean occupancy array.

        Args:
            cells: Array of shape (height, width); True = obstacle
        """
        array = np.array(cells, dtype=bool, copy=True)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"Grid must be a non-empty 2D array, got shape {array.shape}")
        array.flags.writeable = False
        self._cells = array
        self._free_count = int(array.size - np.count_nonzero(array))

    @classmethod
    def empty(cls, width: int, height: int) -> OccupancyGrid:
        """Create an obstacle-free grid."""
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> OccupancyGrid:
        """Create a grid from text rows where '#' marks an obstacle."""
        return cls(np.array([[ch == "#" for ch in row] for row in rows], dtype=bool))

    @property
    def width(self) -> int:
        return int(self._cells.shape[1])

    @property
    def height(self) -> int:
        return int(self._cells.shape[0])

    @property
    def array(self) -> np.ndarray:
        """Read-only (height, width) occupancy array."""
        return self._cells

    @property
    def cells(self) -> List[bool]:
        """Row-major occupancy list of length width * height."""
        return self._cells.ravel().tolist()

    @property
    def free_count(self) -> int:
        return self._free_count

    def occupied(self, h: int, v: int) -> bool:
        """Return True if integer cell (h, v) is an obstacle."""
        return bool(self._cells[v, h])

    def with_obstacles(self, cells: Iterable[Tuple[int, int]]) -> OccupancyGrid:
        """Return a copy with the given (h, v) cells occupied."""
        array = self._cells.copy()
        for h, v in cells:
            array[v, h] = True
        return OccupancyGrid(array)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OccupancyGrid):
            return NotImplemented
        return np.array_equal(self._cells, other._cells)

    def __hash__(self) -> int:
        return hash((self._cells.shape, self._cells.tobytes()))

    def __repr__(self) -> str:
        return f"OccupancyGrid(width={self.width}, height={self.height}, free={self._free_count})"


def is_free(grid: OccupancyGrid, p: Tuple[float, float]) -> bool:
    """
    Return True iff ``p`` is inside the grid and its cell is unoccupied.

    Out-of-bounds points are never free.
    """
    h, v = p[0], p[1]
    if not (0.0 <= h < grid.width and 0.0 <= v < grid.height):
        return False
    return not grid.array[int(math.floor(v)), int(math.floor(h))]


def segment_collision_free(grid: OccupancyGrid, a: Tuple[float, float], b: Tuple[float, float]) -> bool:
    """
    Check a straight segment by sampling it at 0.5 px spacing, endpoints included.

    Endpoints are put in a canonical order first so the result is symmetric in
    ``a`` and ``b`` down to the last bit of every sample position.
    """
    if (b[0], b[1]) < (a[0], a[1]):
        a, b = b, a
    length = distance(a, b)
    count = int(math.ceil(length / SEGMENT_SPACING)) + 1
    if count == 1:
        return is_free(grid, a)

    t = np.linspace(0.0, 1.0, count)
    hs = a[0] + t * (b[0] - a[0])
    vs = a[1] + t * (b[1] - a[1])
    hs[-1], vs[-1] = b[0], b[1]
    inside = (hs >= 0.0) & (hs < grid.width) & (vs >= 0.0) & (vs < grid.height)
    if not inside.all():
        return False
    return not grid.array[np.floor(vs).astype(np.intp), np.floor(hs).astype(np.intp)].any()


def _clip_interval(
    a: Tuple[float, float], b: Tuple[float, float], cell: Tuple[int, int]
) -> Optional[Tuple[float, float]]:
    """Parameter interval of segment a-b inside the closed unit cell, or None."""
    t0, t1 = 0.0, 1.0
    dh = b[0] - a[0]
    dv = b[1] - a[1]
    for p, q in (
        (-dh, a[0] - cell[0]),
        (dh, cell[0] + 1 - a[0]),
        (-dv, a[1] - cell[1]),
        (dv, cell[1] + 1 - a[1]),
    ):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return None
    return t0, t1


def supercover_cells(a: Tuple[float, float], b: Tuple[float, float]) -> Set[Tuple[int, int]]:
    """
    Enumerate every integer cell (h, v) whose closed square the segment a-b touches.

    Exact reference rasterization; the sampled checker is tested against it.
    """
    h_lo = math.floor(min(a[0], b[0])) - 1
    h_hi = math.floor(max(a[0], b[0])) + 1
    v_lo = math.floor(min(a[1], b[1])) - 1
    v_hi = math.floor(max(a[1], b[1])) + 1
    return {
        (h, v)
        for h in range(h_lo, h_hi + 1)
        for v in range(v_lo, v_hi + 1)
        if _clip_interval(a, b, (h, v)) is not None
    }


def cell_chord_length(a: Tuple[float, float], b: Tuple[float, float], cell: Tuple[int, int]) -> float:
    """Length of the part of segment a-b lying inside the closed unit cell."""
    interval = _clip_interval(a, b, cell)
    if interval is None:
        return 0.0
    return (interval[1] - interval[0]) * distance(a, b)


def inflate(grid: OccupancyGrid, radius: float) -> OccupancyGrid:
    """
    Dilate obstacles by a disk of the given radius (circular robot footprint).

    A radius of 0 returns the grid unchanged.
    """
    if radius <= 0:
        return grid
    r = int(math.ceil(radius))
    offsets = np.arange(-r, r + 1)
    disk = (offsets[None, :] ** 2 + offsets[:, None] ** 2) <= radius * radius
    return OccupancyGrid(ndimage.binary_dilation(grid.array, structure=disk))
