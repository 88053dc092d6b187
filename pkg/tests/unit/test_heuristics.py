"""Unit tests for seeded sampling and the heuristic mixture."""

import math

import numpy as np
import pytest
from scipy import stats

from mtplan.forest import Tree, TreeKind
from mtplan.heuristics import (
    GmmModel,
    SeededRng,
    branch_tree,
    fit_branch_gmm,
    fit_gmm,
    gmm_pdf,
    random_state,
    sample_heuristic_state,
    spawn_heuristic_tree,
)
from mtplan.interfaces import NoFreeSpaceError
from mtplan.kinodynamics import State
from mtplan.logging_config import LogCapture
from mtplan.workspace import OccupancyGrid, is_free


class TestSeededRng:

    @pytest.mark.unit
    def test_same_seed_same_sequence(self):
        a, b = SeededRng(7), SeededRng(7)
        assert [a.random() for _ in range(10)] == [b.random() for _ in range(10)]
        assert a.integers(1000) == b.integers(1000)

    @pytest.mark.unit
    def test_different_seeds_differ(self):
        assert SeededRng(1).random() != SeededRng(2).random()

    @pytest.mark.unit
    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            SeededRng(-1)

    @pytest.mark.unit
    def test_accepts_64_bit_seed(self):
        assert SeededRng(2**64 - 1).seed == 2**64 - 1


class TestRandomState:

    @pytest.mark.unit
    def test_samples_are_free(self, wall_grid, rng):
        for _ in range(500):
            assert is_free(wall_grid, random_state(wall_grid, rng))

    @pytest.mark.unit
    def test_single_free_cell(self, rng):
        grid = OccupancyGrid.from_rows(["###", "#.#", "###"])
        p = random_state(grid, rng)
        assert 1.0 <= p.h < 2.0 and 1.0 <= p.v < 2.0

    @pytest.mark.unit
    def test_fully_occupied_grid(self, blocked_grid, rng):
        with pytest.raises(NoFreeSpaceError):
            random_state(blocked_grid, rng)

    @pytest.mark.unit
    def test_uniform_over_free_cells(self):
        """Chi-square against equal counts per free 10 x 10 block."""
        grid = OccupancyGrid.empty(40, 40).with_obstacles((h, v) for h in range(10) for v in range(40))
        rng = SeededRng(5)
        counts = np.zeros((4, 3))
        for _ in range(12000):
            p = random_state(grid, rng)
            counts[int(p.v // 10), int(p.h // 10) - 1] += 1
        assert stats.chisquare(counts.ravel()).pvalue > 0.01


class TestSpawnHeuristicTree:

    @pytest.mark.unit
    def test_random_root(self, wall_grid, rng):
        tree = spawn_heuristic_tree(wall_grid, rng)
        assert tree.kind is TreeKind.HEURISTIC
        assert len(tree) == 1
        assert is_free(wall_grid, tree.root.pos)
        assert -math.pi <= tree.root.theta < math.pi
        assert (tree.root.v, tree.root.omega) == (0.0, 0.0)

    @pytest.mark.unit
    def test_given_root(self, wall_grid, rng):
        tree = spawn_heuristic_tree(wall_grid, rng, at=(20.0, 30.0))
        assert tree.root.pos == (20.0, 30.0)
        with pytest.raises(ValueError, match="free space"):
            spawn_heuristic_tree(wall_grid, rng, at=(49.0, 10.0))

    @pytest.mark.unit
    def test_spatial_index_option(self, wall_grid, rng):
        assert spawn_heuristic_tree(wall_grid, rng, use_spatial_index=True).uses_spatial_index
        assert not spawn_heuristic_tree(wall_grid, rng).uses_spatial_index


class TestGmm:

    @pytest.mark.unit
    def test_model_validation(self):
        with pytest.raises(ValueError):
            GmmModel(np.zeros((0, 2)), np.zeros((0, 2)))
        with pytest.raises(ValueError, match="positive"):
            GmmModel(np.zeros((1, 2)), np.zeros((1, 2)))
        with pytest.raises(ValueError, match="shape"):
            GmmModel(np.zeros((2, 2)), np.ones((1, 2)))

    @pytest.mark.unit
    def test_fit_small_tree_uses_every_node(self):
        tree = Tree(State.at((1.0, 2.0)), TreeKind.HEURISTIC)
        tree.add_node(State.at((3.0, 4.0)), 0)
        model = fit_gmm(tree, kappa_max=32, sigma=5.0)
        assert model.kappa == 2
        np.testing.assert_array_equal(model.means, [[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(model.sigmas, np.full((2, 2), 5.0))

    @pytest.mark.unit
    def test_fit_subsamples_large_tree(self):
        tree = Tree(State.at((0.0, 0.0)), TreeKind.HEURISTIC)
        for k in range(1, 100):
            tree.add_node(State.at((float(k), 0.0)), k - 1)
        model = fit_gmm(tree, kappa_max=20, sigma=1.0)
        selected = [int(m[0]) for m in model.means]
        assert model.kappa == 20
        assert selected[0] == 0 and selected[-1] == 99
        assert selected == sorted(set(selected))

    @pytest.mark.unit
    def test_fit_rejects_bad_parameters(self):
        tree = Tree(State.at((0.0, 0.0)), TreeKind.HEURISTIC)
        with pytest.raises(ValueError):
            fit_gmm(tree, kappa_max=0, sigma=1.0)
        with pytest.raises(ValueError):
            fit_gmm(tree, kappa_max=4, sigma=0.0)

    @pytest.mark.unit
    def test_branch_tree_follows_the_branch(self):
        # fork at node 1: 0 - 1 - 2 - 3 and 1 - 4 - 5
        tree = Tree(State.at((0.0, 0.0)), TreeKind.HEURISTIC)
        for position, parent in [((1.0, 0.0), 0), ((2.0, 0.0), 1), ((3.0, 0.0), 2), ((1.0, 1.0), 1), ((1.0, 2.0), 4)]:
            tree.add_node(State.at(position), parent)
        chain = branch_tree(tree, 3, 5)
        np.testing.assert_array_equal(chain.positions, [[3, 0], [2, 0], [1, 0], [1, 1], [1, 2]])
        assert chain.parents == [None, 0, 1, 2, 3]
        np.testing.assert_array_equal(branch_tree(tree, 3, 5, max_nodes=2).positions, [[3, 0], [2, 0]])
        with pytest.raises(ValueError):
            branch_tree(tree, 3, 5, max_nodes=0)

    @pytest.mark.unit
    def test_branch_mixture_spans_the_branch(self):
        tree = Tree(State.at((0.0, 0.0)), TreeKind.HEURISTIC)
        for k in range(1, 60):
            tree.add_node(State.at((float(k), 0.0)), k - 1)
        tree.add_node(State.at((10.0, 5.0)), 10)
        model = fit_branch_gmm(tree, 0, 59, kappa_max=8, sigma=2.0)
        assert model.kappa == 8
        assert tuple(model.means[0]) == (0.0, 0.0) and tuple(model.means[-1]) == (59.0, 0.0)
        assert (model.means[:, 1] == 0.0).all()
        cut = fit_branch_gmm(tree, 60, 59, kappa_max=8, sigma=2.0, max_nodes=8)
        np.testing.assert_array_equal(cut.means[:, 0], [10, 10, 11, 12, 13, 14, 15, 16])
        np.testing.assert_array_equal(cut.sigmas, np.full((8, 2), 2.0))

    @pytest.mark.unit
    def test_pdf_at_unit_component_mean(self):
        model = GmmModel(np.array([[3.0, -2.0]]), np.ones((1, 2)))
        assert abs(gmm_pdf(model, (3.0, -2.0)) - 1.0 / (2.0 * math.pi)) < 1e-12

    @pytest.mark.unit
    def test_pdf_is_mixture_average(self):
        model = GmmModel(np.array([[0.0, 0.0], [10.0, 0.0]]), np.full((2, 2), 2.0))
        left = GmmModel(np.array([[0.0, 0.0]]), np.full((1, 2), 2.0))
        right = GmmModel(np.array([[10.0, 0.0]]), np.full((1, 2), 2.0))
        p = (1.0, 1.0)
        expected = 0.5 * gmm_pdf(left, p) + 0.5 * gmm_pdf(right, p)
        assert gmm_pdf(model, p) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.unit
    def test_pdf_vectorised_matches_scalar(self):
        model = GmmModel(np.array([[5.0, 5.0], [9.0, 1.0]]), np.array([[1.0, 2.0], [3.0, 0.5]]))
        points = np.array([[5.0, 5.0], [6.0, 2.0], [9.0, 1.5]])
        values = gmm_pdf(model, points)
        for point, value in zip(points, values):
            assert value == pytest.approx(gmm_pdf(model, tuple(point)), rel=1e-12)
        scipy_value = np.mean([
            stats.multivariate_normal(mean=m, cov=np.diag(s ** 2)).pdf(points[1])
            for m, s in zip(model.means, model.sigmas)
        ])
        assert values[1] == pytest.approx(scipy_value, rel=1e-9)

    @pytest.mark.unit
    def test_pdf_integrates_to_one(self):
        model = GmmModel(np.array([[0.0, 0.0], [12.0, -4.0]]), np.array([[5.0, 5.0], [3.0, 6.0]]))
        step = 0.25
        axis = np.arange(-60.0, 60.0, step) + step / 2
        hh, vv = np.meshgrid(axis, axis)
        density = gmm_pdf(model, np.column_stack([hh.ravel(), vv.ravel()]))
        assert abs(density.sum() * step * step - 1.0) < 1e-3


class TestSampleHeuristicState:

    @pytest.mark.unit
    def test_samples_are_free(self, wall_grid, rng):
        model = GmmModel(np.array([[50.0, 40.0]]), np.full((1, 2), 10.0))
        for _ in range(300):
            assert is_free(wall_grid, sample_heuristic_state(model, wall_grid, rng))

    @pytest.mark.unit
    def test_falls_back_to_uniform(self, rng):
        grid = OccupancyGrid.empty(20, 20).with_obstacles((h, v) for h in range(10) for v in range(20))
        model = GmmModel(np.array([[5.0, 10.0]]), np.full((1, 2), 0.1))
        with LogCapture("mtplan.heuristics") as capture:
            p = sample_heuristic_state(model, grid, rng, rejection_cap=5)
        assert p.h >= 10.0
        assert any("falling back" in entry["message"] for entry in capture.get_logs("DEBUG"))

    @pytest.mark.unit
    def test_goodness_of_fit(self):
        """Chi-square of 50,000 draws on a free grid against the mixture density per 10 px bin."""
        grid = OccupancyGrid.empty(100, 80)
        model = GmmModel(np.array([[35.0, 30.0], [65.0, 50.0]]), np.array([[8.0, 8.0], [6.0, 10.0]]))
        rng = SeededRng(31)
        draws = np.array([sample_heuristic_state(model, grid, rng) for _ in range(50000)])
        observed, _, _ = np.histogram2d(draws[:, 0], draws[:, 1], bins=[10, 8], range=[[0, 100], [0, 80]])

        step = 0.5
        hs = np.arange(0.0, 100.0, step) + step / 2
        vs = np.arange(0.0, 80.0, step) + step / 2
        hh, vv = np.meshgrid(hs, vs, indexing="ij")
        density = gmm_pdf(model, np.column_stack([hh.ravel(), vv.ravel()])).reshape(hh.shape)
        mass = density.reshape(10, 20, 8, 20).sum(axis=(1, 3))
        expected = mass / mass.sum() * len(draws)

        keep = expected.ravel() >= 5.0
        obs = observed.ravel()[keep]
        exp = expected.ravel()[keep]
        exp *= obs.sum() / exp.sum()
        assert stats.chisquare(obs, exp).pvalue > 0.01
