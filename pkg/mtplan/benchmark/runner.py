"""
Benchmark harness: paired-seed trials over planners and environments, and
RRT-normalized statistics.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import pandas as pd

from ..config_models import BenchmarkConfig
from ..heuristics import SeededRng
from ..interfaces import BenchmarkError, PlanningError, UnknownMapError
from ..kinodynamics import State
from ..logging_config import get_logger
from ..planners import Query, create_planner
from ..trace import MapRef
from ..workspace.builtin_maps import BUILTIN_NAMES, load_builtin
from ..workspace.grid import OccupancyGrid, Point
from ..workspace.map_io import load_map
from .models import BASELINE_PLANNER, METRICS, BenchmarkStats, CellStats, MetricRecord, MetricStats

logger = get_logger(__name__)


@dataclass(frozen=True)
class Environment:
    """A loaded map together with the query planned on it."""

    env_id: str
    grid: OccupancyGrid
    start: Point
    goal: Point
    start_heading: float
    map_ref: MapRef


def resolve_environment(name: str, config: BenchmarkConfig) -> Environment:
    """
    Load a builtin map by name, or a map file by path, and resolve its query.

    Query overrides in the config replace the builtin start and goal; map files
    require both.

    Raises:
        UnknownMapError: If ``name`` is neither a builtin nor an existing file
        MapFormatError: If the map file is malformed
        BenchmarkError: If a map file has no start/goal override
    """
    override = config.query
    if name in BUILTIN_NAMES:
        builtin = load_builtin(name)
        start, goal, heading = builtin.start, builtin.goal, builtin.start_heading
        grid, env_id, ref = builtin.grid, name, MapRef("builtin", name)
    else:
        path = Path(name)
        if not path.is_file():
            raise UnknownMapError(f"{name!r} is neither a builtin map {list(BUILTIN_NAMES)} nor a map file")
        grid = load_map(path)
        if override.start is None or override.goal is None:
            raise BenchmarkError(f"Map file {path} needs query.start and query.goal in the configuration")
        start, goal, heading = None, None, 0.0
        env_id, ref = path.stem, MapRef("file", str(path))

    if override.start is not None:
        start, heading = Point(override.start[0], override.start[1]), override.start[2]
    if override.goal is not None:
        goal = Point(*override.goal)
    return Environment(env_id, grid, start, goal, heading, ref)


def build_query(env: Environment, config: BenchmarkConfig) -> Query:
    return Query(
        start=State.at(env.start, theta=env.start_heading),
        goal=env.goal,
        params=config.kinodynamics,
        planner=config.planner,
    )


def run_trial(planner_id: str, env: Environment, config: BenchmarkConfig, seed: int) -> MetricRecord:
    """Run one planner on one environment with one seed."""
    result = create_planner(planner_id).plan(build_query(env, config), env.grid, SeededRng(seed))
    return MetricRecord(
        planner=planner_id,
        env=env.env_id,
        seed=seed,
        success=result.success,
        time_s=result.counters.wall_time,
        traj_len_px=result.trajectory_length if result.success else None,
        invalid_connections=result.counters.invalid_connections,
        iterations=result.counters.iterations,
    )


Job = Tuple[str, Environment, BenchmarkConfig, int]


def _run_job(job: Job) -> MetricRecord:
    return run_trial(*job)


def _schedule(config: BenchmarkConfig, environments: List[Environment]) -> List[Job]:
    """Environment, then trial, then planner: every planner runs a trial before the next trial starts."""
    jobs = []
    for env in environments:
        for trial in range(config.trials):
            seed = config.base_seed + trial
            for planner_id in config.planners:
                jobs.append((planner_id, env, config, seed))
    return jobs


def run_benchmark(config: BenchmarkConfig) -> Tuple[List[MetricRecord], BenchmarkStats]:
    """
    Execute planners x environments x trials with paired seeds.

    Trial ``i`` uses seed ``base_seed + i`` for every planner. Records are
    returned sorted by (planner, env, seed) whatever the execution order.

    Raises:
        BenchmarkError: If a map cannot be loaded (the cause is chained)
    """
    environments = []
    for name in config.environments:
        try:
            environments.append(resolve_environment(name, config))
        except BenchmarkError:
            raise
        except (PlanningError, OSError) as e:
            raise BenchmarkError(f"Cannot load environment {name!r}: {e}") from e

    jobs = _schedule(config, environments)
    logger.info(
        f"Benchmark: {len(config.planners)} planners x {len(environments)} environments "
        f"x {config.trials} trials = {len(jobs)} runs (jobs={config.jobs})"
    )

    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_run_job, jobs))
    else:
        records = []
        for index, job in enumerate(jobs, start=1):
            record = _run_job(job)
            records.append(record)
            logger.debug(
                f"[{index}/{len(jobs)}] {record.planner} on {record.env} seed {record.seed}: "
                f"{'success' if record.success else 'failure'} in {record.time_s:.3f}s",
                extra={"planner": record.planner, "env": record.env, "seed": record.seed},
            )

    records.sort(key=lambda r: (r.planner, r.env, r.seed))
    stats = compute_stats(records)
    failures = sum(1 for r in records if not r.success)
    logger.info(f"Benchmark finished: {len(records) - failures} successes, {failures} failures")
    return records, stats


def _ratio(value: Optional[float], baseline: Optional[float]) -> Optional[float]:
    if value is None or baseline is None or baseline == 0.0:
        return None
    return value / baseline


def _finite(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else float(value)


def compute_stats(records: List[MetricRecord]) -> BenchmarkStats:
    """
    Mean and population variance per (planner, environment, metric) over
    successful trials, plus the same values divided by the RRT values for the
    environment. Failed trials are counted in ``excluded``.
    """
    stats = BenchmarkStats()
    if not records:
        return stats

    frame = pd.DataFrame([r.model_dump() for r in records])
    for (planner, env), group in frame.groupby(["planner", "env"], sort=True):
        successful = group[group["success"]]
        cell = CellStats(trials=len(group), successes=len(successful), excluded=len(group) - len(successful))
        for metric in METRICS:
            values = successful[metric].astype(float)
            if len(values):
                cell.metrics[metric] = MetricStats(
                    mean=_finite(values.mean()), variance=_finite(values.var(ddof=0))
                )
            else:
                cell.metrics[metric] = MetricStats()
        stats.planners.setdefault(planner, {})[env] = cell

    baseline = stats.planners.get(BASELINE_PLANNER, {})
    for cells in stats.planners.values():
        for env, cell in cells.items():
            reference = baseline.get(env)
            for metric, entry in cell.metrics.items():
                if reference is None:
                    continue
                ref = reference.metrics[metric]
                entry.normalized_mean = _ratio(entry.mean, ref.mean)
                entry.normalized_variance = _ratio(entry.variance, ref.variance)
    return stats
