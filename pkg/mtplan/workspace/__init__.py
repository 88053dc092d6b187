"""Occupancy-grid workspace: grids, collision predicates, map files and builtin maps."""

from .builtin_maps import BUILTIN_NAMES, BuiltinMap, builtin_map, builtin_queries, load_builtin
from .grid import (
    SEGMENT_SPACING,
    OccupancyGrid,
    Point,
    cell_chord_length,
    distance,
    inflate,
    is_free,
    segment_collision_free,
    supercover_cells,
)
from .map_io import load_map, parse_pgm, parse_text_map, save_map

__all__ = [
    "BUILTIN_NAMES",
    "BuiltinMap",
    "OccupancyGrid",
    "Point",
    "SEGMENT_SPACING",
    "builtin_map",
    "builtin_queries",
    "cell_chord_length",
    "distance",
    "inflate",
    "is_free",
    "load_builtin",
    "load_map",
    "parse_pgm",
    "parse_text_map",
    "save_map",
    "segment_collision_free",
    "supercover_cells",
]
