"""Configuration models for planners and the benchmark harness."""

import math
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

PLANNER_IDS = ("rrt", "b2u", "mtrrt")
SCHEMA_VERSION = 1


class KinodynamicParams(BaseModel):
    """Motion-model bounds, control discretization and cost weights."""

    alpha_v: float = Field(default=2.0, description="Linear acceleration bound (px/step^2)")
    alpha_omega: float = Field(default=math.pi / 4, description="Angular acceleration bound (rad/step^2)")
    dt: float = Field(default=1.0, description="Time step (steps)")
    n_v: int = Field(default=3, description="Linear velocity discretization fractions")
    n_omega: int = Field(default=4, description="Angular velocity discretization fractions")
    v_min_global: float = Field(default=0.0, description="Global minimum linear velocity (px/step)")
    v_max_global: float = Field(default=8.0, description="Global maximum linear velocity (px/step)")
    omega_max_global: float = Field(default=math.pi / 3, description="Global turn-rate clamp (rad/step)")
    w1: float = Field(default=1.0, description="Distance cost weight")
    w2: float = Field(default=0.3, description="Heading cost weight")

    @field_validator("n_v", "n_omega")
    @classmethod
    def fractions_must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Discretization fractions must be at least 1")
        return v

    @field_validator("dt")
    @classmethod
    def dt_must_be_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("Time step must be positive")
        return v

    @field_validator("w1", "w2", "alpha_v", "alpha_omega", "omega_max_global")
    @classmethod
    def must_be_non_negative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("Weights and bounds must be non-negative")
        return v

    @model_validator(mode="after")
    def speed_bounds_ordered(self) -> "KinodynamicParams":
        if self.v_min_global > self.v_max_global:
            raise ValueError("v_min_global must not exceed v_max_global")
        return self


class PlannerParams(BaseModel):
    """Query-level and planner-specific parameters."""

    goal_radius: float = Field(default=15.0, description="Goal region radius (px)")
    max_iterations: int = Field(default=20000, description="Iteration cap N")
    lambda_attach: float = Field(default=25.0, description="Node attachment radius lambda (px)")
    lambda_connect: float = Field(default=15.0, description="Tree proximity threshold (px)")
    sigma: float = Field(default=12.0, description="Heuristic mixture standard deviation (px)")
    kappa_max: int = Field(default=32, description="Maximum mixture components per heuristic tree")
    guidance_budget: int = Field(default=64, description="Heuristic draws per guidance session")
    n_init: int = Field(default=4, description="Heuristic trees spawned before the first iteration")
    goal_bias: float = Field(default=0.05, description="Probability of sampling the goal point")
    goal_tree_step: float = Field(default=15.0, description="Straight-line step of the B2U goal tree (px)")
    rejection_cap: int = Field(default=100, description="Heuristic draws rejected before uniform fallback")
    use_spatial_index: bool = Field(default=False, description="Use the grid-bucket nearest-neighbor index")
    robot_radius: float = Field(default=0.0, description="Circular robot radius used to inflate the grid (px)")
    debug_audit: bool = Field(default=False, description="Audit the forest after every iteration")

    @field_validator("goal_radius", "lambda_attach", "lambda_connect", "sigma", "goal_tree_step")
    @classmethod
    def distances_must_be_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("Distances must be positive")
        return v

    @field_validator("max_iterations", "kappa_max", "guidance_budget", "rejection_cap")
    @classmethod
    def counts_must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Counts must be at least 1")
        return v

    @field_validator("n_init")
    @classmethod
    def n_init_non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("n_init must be non-negative")
        return v

    @field_validator("goal_bias")
    @classmethod
    def bias_is_probability(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError("goal_bias must lie in [0, 1]")
        return v

    @field_validator("robot_radius")
    @classmethod
    def radius_non_negative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("robot_radius must be non-negative")
        return v


class QueryOverride(BaseModel):
    """Optional replacement for a builtin map's fixed start/goal query."""

    start: Optional[Tuple[float, float, float]] = Field(default=None, description="Start (h, v, theta)")
    goal: Optional[Tuple[float, float]] = Field(default=None, description="Goal (h, v)")


class PathsConfig(BaseModel):
    """Configuration for file system paths."""

    log_dir: Path = Field(default=Path("logs"), description="Directory for log files")
    output_dir: Path = Field(default=Path("results"), description="Directory for benchmark exports")


class LoggingConfig(BaseModel):
    """Configuration for the logging framework."""

    level: str = Field(default="INFO", description="Console log level")
    format_console: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(run_id)s - %(message)s",
        description="Console log format"
    )
    log_to_file: bool = Field(default=True, description="Write JSON lines to <log_dir>/run_<id>.log")

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in valid_levels:
            raise ValueError(f"Level must be one of {valid_levels}")
        return v.upper()


class BenchmarkConfig(BaseModel):
    """Top-level configuration of a benchmark run."""

    schema_version: int = Field(default=SCHEMA_VERSION, description="Config schema version")
    environments: List[str] = Field(
        default_factory=lambda: ["room", "clutter", "maze"],
        description="Builtin map names or map file paths"
    )
    planners: List[str] = Field(default_factory=lambda: list(PLANNER_IDS), description="Planner ids")
    trials: int = Field(default=50, description="Trials per (planner, environment)")
    base_seed: int = Field(default=0, description="Trial i uses seed base_seed + i")
    jobs: int = Field(default=1, description="Concurrent trial workers")
    query: QueryOverride = Field(default_factory=QueryOverride)
    kinodynamics: KinodynamicParams = Field(default_factory=KinodynamicParams)
    planner: PlannerParams = Field(default_factory=PlannerParams)
    paths: PathsConfig = Field(default_factory=PathsConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @field_validator("schema_version")
    @classmethod
    def supported_schema(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ValueError(f"Unsupported schema_version {v}, expected {SCHEMA_VERSION}")
        return v

    @field_validator("trials", "jobs")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("trials and jobs must be at least 1")
        return v

    @field_validator("base_seed")
    @classmethod
    def seed_is_64_bit(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValueError("base_seed must be a non-negative 64-bit integer")
        return v

    @field_validator("planners")
    @classmethod
    def known_planners(cls, v: List[str]) -> List[str]:
        unknown = [p for p in v if p not in PLANNER_IDS]
        if unknown:
            raise ValueError(f"Unknown planners {unknown}; expected a subset of {list(PLANNER_IDS)}")
        if not v:
            raise ValueError("At least one planner is required")
        return v

    @field_validator("environments")
    @classmethod
    def environments_non_empty(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("At least one environment is required")
        return v
