"""Benchmark artifact writers: records.csv, stats.json and config.json."""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from ..config_models import BenchmarkConfig
from ..interfaces import ExportWriter
from ..logging_config import get_logger
from .models import RECORD_COLUMNS, BenchmarkStats, MetricRecord

logger = get_logger(__name__)


class RecordsCsvWriter(ExportWriter):
    """One row per trial, sorted by planner, environment and seed."""

    @property
    def filename(self) -> str:
        return "records.csv"

    def write(self, records: List[MetricRecord]) -> Path:
        path = self.get_output_path()
        frame = pd.DataFrame([r.model_dump() for r in records], columns=list(RECORD_COLUMNS) + ["iterations"])
        frame = frame[list(RECORD_COLUMNS)].sort_values(["planner", "env", "seed"], kind="mergesort")
        frame["success"] = frame["success"].map({True: "true", False: "false"})
        try:
            frame.to_csv(path, index=False, na_rep="", lineterminator="\n")
        except OSError as e:
            raise OSError(f"Failed to write records to {path}: {e}") from e
        return path


class _JsonWriter(ExportWriter):
    def _dump(self, data: Dict[str, Any]) -> Path:
        path = self.get_output_path()
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=2, ensure_ascii=False)
                f.write("\n")
        except OSError as e:
            raise OSError(f"Failed to write {self.filename} to {path}: {e}") from e
        return path


class StatsJsonWriter(_JsonWriter):
    """Statistics nested by planner, environment and metric."""

    @property
    def filename(self) -> str:
        return "stats.json"

    def write(self, stats: BenchmarkStats) -> Path:
        return self._dump(stats.model_dump(mode="json"))


class ConfigJsonWriter(_JsonWriter):
    """The resolved configuration; ``mtplan bench --config config.json`` replays it."""

    @property
    def filename(self) -> str:
        return "config.json"

    def write(self, config: BenchmarkConfig) -> Path:
        return self._dump(config.model_dump(mode="json"))


def export_records(
    records: List[MetricRecord],
    stats: BenchmarkStats,
    output_dir: Path,
    config: Optional[BenchmarkConfig] = None,
) -> Dict[str, Path]:
    """
    Write every benchmark artifact into ``output_dir``.

    Returns:
        Mapping of artifact name to written path
    """
    written = {
        "records": RecordsCsvWriter(output_dir).write(records),
        "stats": StatsJsonWriter(output_dir).write(stats),
    }
    if config is not None:
        written["config"] = ConfigJsonWriter(output_dir).write(config)
    for name, path in written.items():
        logger.info(f"Wrote {name} to {path}")
    return written
