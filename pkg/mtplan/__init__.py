"""
Multitree kinodynamic planning.

Kinodynamic RRT, the bidirectional B2U-RRT baseline and the multi-tree MT-RRT
planner with mixture-guided heuristic sampling, on occupancy-grid maps, plus a
paired-seed benchmark harness.
"""

__version__ = "0.1.0"

from .config_loader import create_example_config, load_config
from .config_models import BenchmarkConfig, KinodynamicParams, PlannerParams
from .forest import ConnectionEvent, Forest, Tree, TreeKind
from .heuristics import GmmModel, SeededRng, fit_gmm, gmm_pdf, random_state, sample_heuristic_state
from .interfaces import (
    BenchmarkError,
    ConfigurationError,
    DegenerateInputError,
    ForestInvariantError,
    InvalidNodeError,
    InvalidQueryError,
    MapFormatError,
    NoFreeSpaceError,
    PlanningError,
    UnknownMapError,
)
from .kinodynamics import ControlInput, State, cost, extend, propagate
from .planners import PlanResult, Query, create_planner, plan_b2u, plan_mtrrt, plan_rrt
from .workspace import OccupancyGrid, Point, builtin_map, load_builtin, load_map

__all__ = [
    "BenchmarkConfig",
    "BenchmarkError",
    "ConfigurationError",
    "ConnectionEvent",
    "ControlInput",
    "DegenerateInputError",
    "Forest",
    "ForestInvariantError",
    "GmmModel",
    "InvalidNodeError",
    "InvalidQueryError",
    "KinodynamicParams",
    "MapFormatError",
    "NoFreeSpaceError",
    "OccupancyGrid",
    "PlanResult",
    "PlannerParams",
    "PlanningError",
    "Point",
    "Query",
    "SeededRng",
    "State",
    "Tree",
    "TreeKind",
    "UnknownMapError",
    "builtin_map",
    "cost",
    "create_example_config",
    "create_planner",
    "extend",
    "fit_gmm",
    "gmm_pdf",
    "load_builtin",
    "load_config",
    "load_map",
    "plan_b2u",
    "plan_mtrrt",
    "plan_rrt",
    "propagate",
    "random_state",
    "sample_heuristic_state",
]
