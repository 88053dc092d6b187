"""
Paired-seed comparison of the three planners on the builtin maps.

Runs 3 planners x 3 environments x 50 trials with default parameters and
checks the relative orderings of the means. Deselected by default; run with
``pytest -m slow``.
"""

import os

import pytest

from mtplan.benchmark import run_benchmark
from mtplan.config_models import BenchmarkConfig

TRIALS = 50

pytestmark = [pytest.mark.integration, pytest.mark.slow, pytest.mark.acceptance]


@pytest.fixture(scope="module")
def comparison(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance")
    config = BenchmarkConfig(
        trials=TRIALS,
        jobs=max(1, (os.cpu_count() or 1) - 1),
        paths={"log_dir": out / "logs", "output_dir": out},
        logging={"log_to_file": False},
    )
    return run_benchmark(config)


def _mean(stats, planner, env, metric):
    return stats.metric(planner, env, metric).mean


class TestOrdering:

    @pytest.mark.parametrize("env", ["maze", "clutter"])
    def test_mtrrt_fastest_in_hard_maps(self, comparison, env):
        _, stats = comparison
        mt, b2u, rrt = (_mean(stats, p, env, "time_s") for p in ("mtrrt", "b2u", "rrt"))
        assert mt < b2u < rrt
        assert mt <= 0.9 * rrt

    def test_room_ordering(self, comparison):
        _, stats = comparison
        mt, b2u, rrt = (_mean(stats, p, "room", "time_s") for p in ("mtrrt", "b2u", "rrt"))
        assert b2u <= mt < rrt

    @pytest.mark.parametrize("env", ["room", "clutter", "maze"])
    def test_mtrrt_fewest_invalid_connections(self, comparison, env):
        _, stats = comparison
        mt, b2u, rrt = (_mean(stats, p, env, "invalid_connections") for p in ("mtrrt", "b2u", "rrt"))
        assert mt < b2u and mt < rrt

    @pytest.mark.parametrize("env", ["room", "clutter", "maze"])
    def test_b2u_faster_than_rrt(self, comparison, env):
        _, stats = comparison
        assert _mean(stats, "b2u", env, "time_s") < _mean(stats, "rrt", env, "time_s")

    @pytest.mark.parametrize("env", ["room", "clutter", "maze"])
    def test_rrt_normalizes_to_one(self, comparison, env):
        _, stats = comparison
        for metric in ("time_s", "traj_len_px", "invalid_connections"):
            assert stats.metric("rrt", env, metric).normalized_mean == 1.0


class TestCompleteness:

    @pytest.mark.parametrize("planner", ["rrt", "b2u", "mtrrt"])
    @pytest.mark.parametrize("env", ["room", "clutter", "maze"])
    def test_success_rate(self, comparison, planner, env):
        _, stats = comparison
        cell = stats.cell(planner, env)
        assert cell.trials == TRIALS
        assert cell.successes >= 0.95 * TRIALS
