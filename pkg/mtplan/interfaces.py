"""Exception hierarchy and abstract interfaces shared across the planner package."""

from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .heuristics import SeededRng
    from .planners.base import PlanResult, Query
    from .workspace.grid import OccupancyGrid


class PlanningError(Exception):
    """Base exception for all planner-related errors."""


class ConfigurationError(PlanningError):
    """Raised when configuration loading or validation fails."""


class NoFreeSpaceError(ConfigurationError):
    """Raised when a sampler is asked to draw from a grid without free cells."""


class MapFormatError(PlanningError):
    """Raised when a map file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, offset: Optional[int] = None):
        """
        Initialize the error with an optional source position.

        Args:
            message: Description of the problem
            line: 1-based line number in a text map
            offset: Byte offset in a binary map
        """
        location = []
        if line is not None:
            location.append(f"line {line}")
        if offset is not None:
            location.append(f"byte {offset}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.line = line
        self.offset = offset


class UnknownMapError(PlanningError):
    """Raised when a builtin map name is not recognised."""


class DegenerateInputError(PlanningError):
    """Raised when the cost function is evaluated on coincident points."""


class InvalidNodeError(PlanningError):
    """Raised when a node index does not exist in a tree."""


class InvalidQueryError(PlanningError):
    """Raised when a planning query violates its preconditions."""


class ForestInvariantError(PlanningError):
    """Raised by the debug audit when a tree or forest invariant is broken."""


class BenchmarkError(PlanningError):
    """Raised when a benchmark run cannot be set up."""


class Planner(ABC):
    """Interface every planner implements."""

    @property
    @abstractmethod
    def planner_id(self) -> str:
        """Return the short identifier used in configs and exports."""

    @abstractmethod
    def plan(self, query: Query, grid: OccupancyGrid, rng: SeededRng) -> PlanResult:
        """
        Solve a single planning query.

        Args:
            query: Start state, goal point and parameters
            grid: Occupancy grid to plan in
            rng: Seeded random source owned by this trial

        Returns:
            Plan result; failure is reported through ``success=False``
        """


class ExportWriter(ABC):
    """Base class for benchmark artifact writers."""

    def __init__(self, output_dir: Path):
        """
        Initialize the writer.

        Args:
            output_dir: Directory where artifacts will be written
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    @property
    @abstractmethod
    def filename(self) -> str:
        """File name this writer produces."""

    def get_output_path(self) -> Path:
        """Get the full output path for the artifact."""
        return self.output_dir / self.filename
