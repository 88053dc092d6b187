"""Configuration loading and management."""

import os
from pathlib import Path
from typing import Optional

import yaml
from pydantic import ValidationError

from .config_models import BenchmarkConfig
from .interfaces import ConfigurationError

__all__ = ["ConfigurationError", "load_config", "create_example_config"]

DEFAULT_CONFIG_PATH = Path("config/bench.yml")


def load_config(config_path: Optional[Path] = None) -> BenchmarkConfig:
    """
    Load and validate a benchmark configuration.

    JSON files are accepted as well, since the YAML loader parses them.

    Args:
        config_path: Path to the configuration file. Defaults to config/bench.yml,
            which may be absent (built-in defaults are used then)

    Returns:
        Validated BenchmarkConfig instance

    Raises:
        ConfigurationError: If an explicitly given file does not exist, or if
            configuration loading or validation fails
    """
    if config_path is None:
        config_path = DEFAULT_CONFIG_PATH
    elif not config_path.exists():
        raise ConfigurationError(f"Config file {config_path} does not exist")

    config_data: dict = {}
    if config_path.exists():
        try:
            with open(config_path) as f:
                config_data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Failed to parse config {config_path}: {e}") from e
        except OSError as e:
            raise ConfigurationError(f"Failed to read config file {config_path}: {e}") from e

    if not isinstance(config_data, dict):
        raise ConfigurationError(f"Config {config_path} must contain a mapping at top level")

    env_overrides = _load_env_overrides()
    for section, values in env_overrides.items():
        if isinstance(values, dict):
            config_data.setdefault(section, {}).update(values)
        else:
            config_data[section] = values

    try:
        return BenchmarkConfig(**config_data)
    except ValidationError as e:
        raise ConfigurationError(f"Configuration validation failed: {e}") from e


def _load_env_overrides() -> dict:
    """Load configuration overrides from environment variables."""
    overrides: dict = {}

    env_mappings = {
        "MTPLAN_LOG_LEVEL": ("logging", "level"),
        "MTPLAN_LOG_DIR": ("paths", "log_dir"),
        "MTPLAN_OUTPUT_DIR": ("paths", "output_dir"),
        "MTPLAN_TRIALS": ("trials",),
        "MTPLAN_BASE_SEED": ("base_seed",),
        "MTPLAN_JOBS": ("jobs",),
    }

    for env_var, config_path in env_mappings.items():
        value = os.getenv(env_var)
        if value is not None:
            current = overrides
            for key in config_path[:-1]:
                if key not in current:
                    current[key] = {}
                current = current[key]
            current[config_path[-1]] = value

    return overrides


def create_example_config(output_path: Path = Path("config/bench.yml.example")) -> None:
    """Create an example benchmark configuration file."""
    example_config = {
        "schema_version": 1,
        "environments": ["room", "clutter", "maze"],
        "planners": ["rrt", "b2u", "mtrrt"],
        "trials": 50,
        "base_seed": 0,
        "jobs": 1,
        "kinodynamics": {
            "alpha_v": 2.0,
            "n_v": 3,
            "n_omega": 4,
            "v_max_global": 8.0,
            "w1": 1.0,
            "w2": 0.3
        },
        "planner": {
            "goal_radius": 15.0,
            "max_iterations": 20000,
            "lambda_attach": 25.0,
            "lambda_connect": 15.0,
            "sigma": 12.0,
            "kappa_max": 32,
            "guidance_budget": 64,
            "goal_bias": 0.05
        },
        "paths": {
            "log_dir": "logs",
            "output_dir": "results"
        },
        "logging": {
            "level": "INFO"
        }
    }

    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w") as f:
        yaml.dump(example_config, f, default_flow_style=False, sort_keys=False)
