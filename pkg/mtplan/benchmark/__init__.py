"""Benchmark harness, exports and SVG rendering."""

from .exporters import ConfigJsonWriter, RecordsCsvWriter, StatsJsonWriter, export_records
from .models import METRICS, RECORD_COLUMNS, BenchmarkStats, CellStats, MetricRecord, MetricStats
from .render import obstacle_runs, render_svg, render_svg_text
from .runner import Environment, build_query, compute_stats, resolve_environment, run_benchmark, run_trial

__all__ = [
    "BenchmarkStats",
    "CellStats",
    "ConfigJsonWriter",
    "Environment",
    "METRICS",
    "MetricRecord",
    "MetricStats",
    "RECORD_COLUMNS",
    "RecordsCsvWriter",
    "StatsJsonWriter",
    "build_query",
    "compute_stats",
    "export_records",
    "obstacle_runs",
    "render_svg",
    "render_svg_text",
    "resolve_environment",
    "run_benchmark",
    "run_trial",
]
