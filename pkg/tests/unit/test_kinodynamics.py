"""Unit tests for the motion model, the cost and the extend step."""

import math

import numpy as np
import pytest

from mtplan.config_models import KinodynamicParams
from mtplan.forest import Tree, TreeKind
from mtplan.interfaces import DegenerateInputError
from mtplan.kinodynamics import (
    ControlInput,
    State,
    candidate_cost,
    candidate_values,
    cost,
    discretize,
    enumerate_candidates,
    extend,
    propagate,
    velocity_window,
    wrap_angle,
)
from mtplan.planners import PlanCounters
from mtplan.workspace import OccupancyGrid, Point, distance, segment_collision_free


class TestWrapAngle:

    @pytest.mark.unit
    @pytest.mark.parametrize("theta, expected", [
        (0.0, 0.0),
        (math.pi, -math.pi),
        (-math.pi, -math.pi),
        (3 * math.pi / 2, -math.pi / 2),
        (-3 * math.pi / 2, math.pi / 2),
        (4 * math.pi + 0.25, 0.25),
    ])
    def test_values(self, theta, expected):
        assert wrap_angle(theta) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.unit
    def test_range_is_half_open(self):
        rng = np.random.default_rng(0)
        for theta in rng.uniform(-50, 50, 2000):
            wrapped = wrap_angle(float(theta))
            assert -math.pi <= wrapped < math.pi


class TestWindows:

    @pytest.mark.unit
    def test_velocity_window_clamps(self):
        assert velocity_window(1.0, 2.0, 1.0, 0.0, 8.0) == (0.0, 3.0)
        assert velocity_window(7.0, 2.0, 1.0, 0.0, 8.0) == (5.0, 8.0)

    @pytest.mark.unit
    def test_velocity_window_rejects_inverted_bounds(self):
        with pytest.raises(ValueError, match="out of order"):
            velocity_window(0.0, 1.0, 1.0, 2.0, 1.0)

    @pytest.mark.unit
    def test_discretize(self):
        assert discretize(0.0, 3.0, 3) == 1.0
        assert discretize(2.0, 2.0, 4) == 0.0
        with pytest.raises(ValueError):
            discretize(0.0, 1.0, 0)

    @pytest.mark.unit
    def test_candidate_values_include_both_bounds(self):
        assert candidate_values(0.0, 4.0, 4) == [0.0, 1.0, 2.0, 3.0, 4.0]


class TestPropagate:

    @pytest.mark.unit
    def test_turn_then_translate(self):
        x = State.at((10.0, 10.0), theta=0.0)
        y = propagate(x, ControlInput(2.0, math.pi / 2), 1.0)
        assert y.theta == pytest.approx(math.pi / 2)
        assert y.pos.h == pytest.approx(10.0, abs=1e-12)
        assert y.pos.v == pytest.approx(12.0)
        assert (y.v, y.omega) == (2.0, math.pi / 2)

    @pytest.mark.unit
    def test_zero_control_keeps_position(self):
        x = State.at((3.0, 4.0), theta=1.0, v=2.0)
        y = propagate(x, ControlInput(0.0, 0.0), 1.0)
        assert y.pos == x.pos
        assert y.theta == x.theta

    @pytest.mark.unit
    def test_is_deterministic_to_the_bit(self):
        x = State.at((123.456, 78.9), theta=-2.5, v=3.0, omega=0.1)
        u = ControlInput(4.0 / 3.0, math.pi / 12)
        assert propagate(x, u, 1.0) == propagate(x, u, 1.0)


class TestCost:

    @pytest.mark.unit
    def test_pure_distance(self, kino_params):
        x_new = State.at((0.0, 0.0), theta=0.0)
        value = cost(x_new, (10.0, 0.0), (0.0, 0.0), (100.0, 0.0), kino_params)
        assert value == pytest.approx(0.1)

    @pytest.mark.unit
    def test_heading_term_uses_bearing_to_sample(self):
        params = KinodynamicParams(w1=0.0, w2=1.0)
        x_new = State.at((0.0, 0.0), theta=0.0)
        assert cost(x_new, (0.0, 5.0), (0.0, 0.0), (1.0, 0.0), params) == pytest.approx(math.pi / 2)
        assert cost(x_new, (-5.0, 0.0), (0.0, 0.0), (1.0, 0.0), params) == pytest.approx(math.pi)

    @pytest.mark.unit
    def test_degenerate_inputs(self, kino_params):
        x_new = State.at((1.0, 1.0))
        with pytest.raises(DegenerateInputError):
            cost(x_new, (1.0, 1.0), (0.0, 0.0), (5.0, 5.0), kino_params)
        with pytest.raises(DegenerateInputError):
            cost(x_new, (2.0, 2.0), (3.0, 3.0), (3.0, 3.0), kino_params)

    @pytest.mark.unit
    def test_candidate_on_sample_costs_zero(self, kino_params):
        assert candidate_cost(State.at((2.0, 2.0)), (2.0, 2.0), 10.0, kino_params) == 0.0


class TestEnumerateCandidates:

    @pytest.mark.unit
    def test_count_and_order(self, kino_params):
        x = State.at((50.0, 50.0), theta=0.0, v=4.0)
        candidates = enumerate_candidates(x, kino_params)
        assert len(candidates) == (kino_params.n_v + 1) * (kino_params.n_omega + 1)
        controls = [u for u, _ in candidates]
        assert controls[0].v == 2.0
        assert controls[-1].v == 6.0
        # linear velocity index is the outer loop
        assert [u.v for u in controls[: kino_params.n_omega + 1]] == [2.0] * (kino_params.n_omega + 1)

    @pytest.mark.unit
    def test_candidates_respect_global_bounds(self, kino_params):
        x = State.at((50.0, 50.0), v=7.5, omega=1.0)
        for u, _ in enumerate_candidates(x, kino_params):
            assert kino_params.v_min_global <= u.v <= kino_params.v_max_global
            assert abs(u.omega) <= kino_params.omega_max_global + 1e-12


def _oracle_extend(tree, x_rand, grid, params, start, goal):
    """Evaluate every candidate, keep the collision-free ones, take the argmin."""
    near = tree.nearest_neighbor(x_rand)
    x_near = tree.nodes[near]
    scale = distance(start, goal)
    best = None
    for k, (_, candidate) in enumerate(enumerate_candidates(x_near, params)):
        if not segment_collision_free(grid, x_near.pos, candidate.pos):
            continue
        key = (candidate_cost(candidate, x_rand, scale, params), k)
        if best is None or key < best[0]:
            best = (key, candidate)
    return None if best is None else best[1]


class TestExtend:

    @pytest.mark.unit
    def test_moves_towards_sample(self, open_grid, kino_params):
        tree = Tree(State.at((10.0, 40.0), theta=0.0), TreeKind.ROOTED)
        counters = PlanCounters()
        new = extend(tree, (90.0, 40.0), open_grid, kino_params, counters, start=(10.0, 40.0), goal=(90.0, 40.0))
        assert new is not None
        assert len(tree) == 2
        assert tree.nodes[1] == new
        assert tree.parents[1] == 0
        assert new.pos.h > 10.0
        assert counters.invalid_connections == 0
        assert counters.candidates_evaluated == 20

    @pytest.mark.unit
    def test_counts_rejected_candidates(self, kino_params):
        # wall right in front of a fast-moving node: only slow candidates survive
        grid = OccupancyGrid.empty(40, 20).with_obstacles((h, v) for h in range(13, 16) for v in range(20))
        x_near = State.at((10.0, 10.0), theta=0.0, v=4.0)
        tree = Tree(x_near, TreeKind.ROOTED)
        counters = PlanCounters()
        new = extend(tree, (35.0, 10.0), grid, kino_params, counters, start=(10.0, 10.0), goal=(35.0, 10.0))
        assert new is not None
        assert new.v == 2.0
        assert counters.invalid_connections > 0

    @pytest.mark.unit
    def test_enclosed_node_adds_nothing(self, kino_params):
        # v window [6, 8]: every candidate leaves the box
        grid = OccupancyGrid.from_rows(["#####", "#...#", "#...#", "#...#", "#####"])
        tree = Tree(State.at((2.5, 2.5), theta=0.0, v=8.0), TreeKind.ROOTED)
        counters = PlanCounters()
        new = extend(tree, (4.5, 4.5), grid, kino_params, counters, start=(2.5, 2.5), goal=(4.5, 4.5))
        assert new is None
        assert len(tree) == 1
        assert counters.invalid_connections == counters.candidates_evaluated == 20

    @pytest.mark.unit
    def test_start_equal_goal_is_degenerate(self, open_grid, kino_params):
        tree = Tree(State.at((10.0, 10.0)), TreeKind.ROOTED)
        with pytest.raises(DegenerateInputError):
            extend(tree, (20.0, 20.0), open_grid, kino_params, PlanCounters(), start=(5.0, 5.0), goal=(5.0, 5.0))

    @pytest.mark.unit
    def test_matches_evaluate_all_oracle(self, wall_grid):
        """Randomized trees and samples: extend picks the oracle's candidate every time."""
        rng = np.random.default_rng(2024)
        params = KinodynamicParams()
        start, goal = Point(5.0, 5.0), Point(95.0, 75.0)
        for _ in range(200):
            root = Point(*rng.uniform((1.0, 1.0), (47.0, 79.0)))
            x0 = State.at(root, theta=float(rng.uniform(-math.pi, math.pi)), v=float(rng.uniform(0, 8)),
                          omega=float(rng.uniform(-1.0, 1.0)))
            tree = Tree(x0, TreeKind.ROOTED)
            for _ in range(int(rng.integers(0, 5))):
                extend(tree, tuple(rng.uniform((0, 0), (100, 80))), wall_grid, params, PlanCounters(),
                       start=start, goal=goal)
            x_rand = tuple(rng.uniform((0, 0), (100, 80)))
            expected = _oracle_extend(tree, x_rand, wall_grid, params, start, goal)
            actual = extend(tree, x_rand, wall_grid, params, PlanCounters(), start=start, goal=goal)
            assert actual == expected

    @pytest.mark.unit
    def test_selected_control_reproduces_child(self, wall_grid, kino_params):
        """The child stores the control it was made with: re-propagating it from the parent gives the same bits."""
        rng = np.random.default_rng(77)
        start, goal = Point(5.0, 5.0), Point(95.0, 75.0)
        tree = Tree(State.at((20.0, 40.0), theta=0.3, v=3.0, omega=0.2), TreeKind.ROOTED)
        for _ in range(150):
            x_rand = tuple(rng.uniform((0, 0), (100, 80)))
            new = extend(tree, x_rand, wall_grid, kino_params, PlanCounters(), start=start, goal=goal)
            if new is None:
                continue
            x_near = tree.nodes[tree.parents[-1]]
            assert propagate(x_near, ControlInput(new.v, new.omega), kino_params.dt) == new
        assert len(tree) > 20
