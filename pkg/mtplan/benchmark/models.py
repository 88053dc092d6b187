"""Data models for benchmark records and aggregated statistics."""

from typing import Dict, Optional

from pydantic import BaseModel, Field

from ..config_models import SCHEMA_VERSION

METRICS = ("time_s", "traj_len_px", "invalid_connections")
RECORD_COLUMNS = ("planner", "env", "seed", "success", "time_s", "traj_len_px", "invalid_connections")
BASELINE_PLANNER = "rrt"


class MetricRecord(BaseModel):
    """Outcome of one trial."""

    planner: str
    env: str
    seed: int
    success: bool
    time_s: float
    traj_len_px: Optional[float] = Field(default=None, description="None when the trial failed")
    invalid_connections: int
    iterations: int = 0


class MetricStats(BaseModel):
    """Population statistics of one metric over the successful trials of a cell."""

    mean: Optional[float] = None
    variance: Optional[float] = None
    normalized_mean: Optional[float] = Field(default=None, description="mean / RRT mean, same environment")
    normalized_variance: Optional[float] = Field(default=None, description="variance / RRT variance, same environment")


class CellStats(BaseModel):
    """Statistics of one (planner, environment) cell."""

    trials: int
    successes: int
    excluded: int = Field(description="Failed trials left out of every mean and variance")
    metrics: Dict[str, MetricStats] = Field(default_factory=dict)


class BenchmarkStats(BaseModel):
    """Aggregated statistics nested by planner, then environment."""

    schema_version: int = SCHEMA_VERSION
    baseline: str = BASELINE_PLANNER
    planners: Dict[str, Dict[str, CellStats]] = Field(default_factory=dict)

    def cell(self, planner: str, env: str) -> CellStats:
        try:
            return self.planners[planner][env]
        except KeyError:
            raise KeyError(f"No statistics for planner {planner!r} in environment {env!r}") from None

    def metric(self, planner: str, env: str, metric: str) -> MetricStats:
        return self.cell(planner, env).metrics[metric]
