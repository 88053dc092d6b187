"""
Central pytest configuration and fixtures.

Shared fixtures: an isolated benchmark configuration, the builtin maps (built
once per session), small synthetic grids and ready-made queries.
"""

import tempfile
from collections.abc import Generator
from pathlib import Path
from typing import Dict, Optional

import pytest

from mtplan.config_loader import load_config
from mtplan.config_models import BenchmarkConfig, KinodynamicParams, PlannerParams
from mtplan.heuristics import SeededRng
from mtplan.kinodynamics import State
from mtplan.planners import Query
from mtplan.workspace import BUILTIN_NAMES, BuiltinMap, OccupancyGrid, Point, load_builtin

_session_config: Optional[BenchmarkConfig] = None


# ================================================================================
# Session-scoped fixtures (created once per test session)
# ================================================================================

@pytest.fixture(scope="session")
def config() -> BenchmarkConfig:
    """
    Default benchmark configuration with log and output paths in a temporary directory.

    The configuration is read from an empty file in a temporary directory so
    a developer's local config/bench.yml never leaks into the tests.
    """
    global _session_config

    if _session_config is None:
        temp_dir = Path(tempfile.mkdtemp(prefix="mtplan_test_"))
        empty = temp_dir / "bench.yml"
        empty.write_text("", encoding="utf-8")
        _session_config = load_config(empty)
        _session_config.paths.log_dir = temp_dir / "logs"
        _session_config.paths.output_dir = temp_dir / "results"

    return _session_config


@pytest.fixture(scope="session")
def builtin_maps() -> Dict[str, BuiltinMap]:
    """All builtin environments, built once."""
    return {name: load_builtin(name) for name in BUILTIN_NAMES}


@pytest.fixture(scope="session")
def room(builtin_maps: Dict[str, BuiltinMap]) -> BuiltinMap:
    return builtin_maps["room"]


@pytest.fixture(scope="session")
def maze(builtin_maps: Dict[str, BuiltinMap]) -> BuiltinMap:
    return builtin_maps["maze"]


# ================================================================================
# Synthetic grids
# ================================================================================

@pytest.fixture
def open_grid() -> OccupancyGrid:
    """100 x 80 grid without obstacles."""
    return OccupancyGrid.empty(100, 80)


@pytest.fixture
def wall_grid() -> OccupancyGrid:
    """
    100 x 80 grid split by a vertical wall at h = 48..51 with a 10 px gap at
    v = 60..69.
    """
    grid = OccupancyGrid.empty(100, 80)
    return grid.with_obstacles((h, v) for h in range(48, 52) for v in range(80) if not 60 <= v < 70)


@pytest.fixture
def blocked_grid() -> OccupancyGrid:
    """5 x 5 grid with every cell occupied."""
    return OccupancyGrid.from_rows(["#####"] * 5)


# ================================================================================
# Function-scoped fixtures (created for each test function)
# ================================================================================

@pytest.fixture
def kino_params() -> KinodynamicParams:
    return KinodynamicParams()


@pytest.fixture
def planner_params() -> PlannerParams:
    return PlannerParams(max_iterations=4000)


@pytest.fixture
def rng() -> SeededRng:
    return SeededRng(12345)


@pytest.fixture
def open_query(kino_params: KinodynamicParams, planner_params: PlannerParams) -> Query:
    """Left-to-right query across the open grid."""
    return Query(
        start=State.at((10.0, 40.0), theta=0.0),
        goal=Point(90.0, 40.0),
        params=kino_params,
        planner=planner_params,
    )


@pytest.fixture
def room_query(room: BuiltinMap) -> Query:
    return Query(
        start=State.at(room.start, theta=room.start_heading),
        goal=room.goal,
        planner=PlannerParams(),
    )


@pytest.fixture
def output_dir() -> Generator[Path, None, None]:
    """Temporary directory for exported artifacts."""
    with tempfile.TemporaryDirectory(prefix="mtplan_out_") as temp_dir:
        yield Path(temp_dir)


# ================================================================================
# Pytest hooks
# ================================================================================

def pytest_collection_modifyitems(config: pytest.Config, items) -> None:
    """Mark everything under tests/integration as integration unless marked otherwise."""
    for item in items:
        if "integration" in str(item.fspath) and not any(item.iter_markers(name="unit")):
            item.add_marker(pytest.mark.integration)
