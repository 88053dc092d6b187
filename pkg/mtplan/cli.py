"""Command-line interface: plan, bench, maps and validate."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from .benchmark import export_records, render_svg, resolve_environment, run_benchmark
from .benchmark.runner import build_query
from .config_loader import load_config
from .config_models import PLANNER_IDS, BenchmarkConfig
from .heuristics import SeededRng
from .interfaces import (
    BenchmarkError,
    ConfigurationError,
    InvalidQueryError,
    MapFormatError,
    PlanningError,
    UnknownMapError,
)
from .logging_config import get_logger, setup_logging
from .planners import create_planner
from .trace import read_trace, validate_trace, write_trace
from .workspace import BUILTIN_NAMES, inflate, load_builtin, load_map, save_map

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

USAGE_ERRORS = (ConfigurationError, MapFormatError, UnknownMapError, InvalidQueryError, BenchmarkError)


def _csv(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative 64-bit integer, got {seed}")
    return seed


def create_parser() -> argparse.ArgumentParser:
    """Create the command-line argument parser."""
    parser = argparse.ArgumentParser(
        prog="mtplan",
        description="Kinodynamic RRT, B2U-RRT and multi-tree MT-RRT planners with a benchmark harness",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Plan one query on a builtin map and render the forest
  mtplan plan --builtin room --planner mtrrt --seed 7 --render room.svg

  # Plan on a map file with an explicit query, keeping the event trace
  mtplan plan --map lab.pgm --start 20 20 0 --goal 400 300 --trace lab.trace

  # Full comparison: 3 planners x 3 maps x 50 paired-seed trials
  mtplan bench --trials 50 --planners rrt,b2u,mtrrt --envs room,clutter,maze

  # Replay an exported benchmark
  mtplan bench --config results/config.json --output-dir replay

  # Write the builtin maps and re-check a trace
  mtplan maps --out-dir docs --format svg
  mtplan validate lab.trace
        """
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Console log level (overrides config)"
    )
    parser.add_argument(
        "--no-log-file",
        action="store_true",
        help="Do not write the JSON log file"
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    plan = subparsers.add_parser("plan", help="Solve a single query and print its metrics as JSON")
    source = plan.add_mutually_exclusive_group()
    source.add_argument("--builtin", choices=BUILTIN_NAMES, help="Builtin map (default: room)")
    source.add_argument("--map", type=Path, help="Map file (.pgm or text format)")
    plan.add_argument("--planner", choices=PLANNER_IDS, default="mtrrt", help="Planner (default: mtrrt)")
    plan.add_argument("--seed", type=_seed, default=0, help="Random seed (default: 0)")
    plan.add_argument("--config", type=Path, help="Configuration file supplying planner parameters")
    plan.add_argument("--start", type=float, nargs=3, metavar=("H", "V", "THETA"), help="Start state")
    plan.add_argument("--goal", type=float, nargs=2, metavar=("H", "V"), help="Goal position")
    plan.add_argument("--max-iterations", type=int, help="Iteration cap (overrides config)")
    plan.add_argument("--render", type=Path, metavar="SVG", help="Write an SVG of the final forest")
    plan.add_argument("--trace", type=Path, help="Write the event trace")
    plan.add_argument("--trajectory-out", type=Path, metavar="JSON", help="Write the trajectory as JSON")

    bench = subparsers.add_parser("bench", help="Run the paired-seed benchmark and export the results")
    bench.add_argument("--config", type=Path, help="Configuration file (YAML or an exported config.json)")
    bench.add_argument("--trials", type=int, help="Trials per planner and environment")
    bench.add_argument("--planners", type=_csv, help="Comma-separated planner ids")
    bench.add_argument("--envs", type=_csv, help="Comma-separated builtin names or map paths")
    bench.add_argument("--base-seed", type=int, help="Seed of trial 0")
    bench.add_argument("--jobs", type=int, help="Concurrent trial workers")
    bench.add_argument("--max-iterations", type=int, help="Iteration cap per trial")
    bench.add_argument("--output-dir", type=Path, help="Directory for records.csv, stats.json and config.json")

    maps = subparsers.add_parser("maps", help="Write the builtin maps to files")
    maps.add_argument("--out-dir", type=Path, default=Path("docs"), help="Output directory (default: docs)")
    maps.add_argument("--format", choices=["txt", "pgm", "svg"], default="svg", help="File format (default: svg)")

    validate = subparsers.add_parser("validate", help="Re-check a trace file against the forest invariants")
    validate.add_argument("trace", type=Path, help="Trace file written by plan --trace")

    return parser


def _override(config: BenchmarkConfig, updates: Dict[str, Any]) -> BenchmarkConfig:
    """Apply nested overrides and re-run validation."""
    data = config.model_dump()
    for key, value in updates.items():
        if value is None:
            continue
        if isinstance(value, dict):
            data.setdefault(key, {}).update({k: v for k, v in value.items() if v is not None})
        else:
            data[key] = value
    try:
        return BenchmarkConfig(**data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid command-line override: {e}") from e


def _load(args: argparse.Namespace, updates: Dict[str, Any]) -> BenchmarkConfig:
    config = _override(load_config(getattr(args, "config", None)), updates)
    logging_updates = {
        "level": args.log_level,
        "log_to_file": False if args.no_log_file else None,
    }
    return _override(config, {"logging": logging_updates})


def cmd_plan(args: argparse.Namespace) -> int:
    config = _load(args, {
        "query": {"start": args.start, "goal": args.goal},
        "planner": {"max_iterations": args.max_iterations},
    })
    setup_logging(config)

    name = str(args.map) if args.map is not None else (args.builtin or "room")
    env = resolve_environment(name, config)
    result = create_planner(args.planner).plan(build_query(env, config), env.grid, SeededRng(args.seed))

    metrics = result.metrics()
    metrics["env"] = env.env_id
    print(json.dumps(metrics, indent=2))

    if args.trajectory_out is not None:
        args.trajectory_out.parent.mkdir(parents=True, exist_ok=True)
        args.trajectory_out.write_text(json.dumps(metrics["trajectory"], indent=2) + "\n", encoding="utf-8")
    if args.render is not None:
        render_svg(env.grid, result.forest, result.trajectory, args.render, start=env.start, goal=env.goal)
    if args.trace is not None:
        write_trace(result, args.trace, env.map_ref)

    return EXIT_OK if result.success else EXIT_FAILURE


def cmd_bench(args: argparse.Namespace) -> int:
    config = _load(args, {
        "trials": args.trials,
        "planners": args.planners,
        "environments": args.envs,
        "base_seed": args.base_seed,
        "jobs": args.jobs,
        "planner": {"max_iterations": args.max_iterations},
        "paths": {"output_dir": args.output_dir},
    })
    setup_logging(config)

    records, stats = run_benchmark(config)
    written = export_records(records, stats, config.paths.output_dir, config)

    print(f"{len(records)} records")
    for name, path in written.items():
        print(f"  {name}: {path}")
    return EXIT_OK


def cmd_maps(args: argparse.Namespace) -> int:
    config = _load(args, {})
    setup_logging(config)

    for name in BUILTIN_NAMES:
        builtin = load_builtin(name)
        path = args.out_dir / f"{name}.{args.format}"
        if args.format == "svg":
            render_svg(builtin.grid, None, (), path, start=builtin.start, goal=builtin.goal)
        else:
            save_map(builtin.grid, path)
        print(path)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = _load(args, {})
    setup_logging(config)

    trace = read_trace(args.trace)
    if trace.map_ref.kind == "builtin":
        grid = load_builtin(trace.map_ref.ref).grid
    else:
        grid = load_map(Path(trace.map_ref.ref))
    violations = validate_trace(trace, inflate(grid, trace.robot_radius))

    for violation in violations:
        print(violation)
    if violations:
        logger.warning(f"{args.trace}: {len(violations)} violation(s)")
        return EXIT_FAILURE
    print(f"{args.trace}: ok")
    return EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "bench": cmd_bench,
    "maps": cmd_maps,
    "validate": cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        return COMMANDS[args.command](args)

    except KeyboardInterrupt:
        print("\nOperation cancelled by user", file=sys.stderr)
        return 130

    except USAGE_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except (PlanningError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
