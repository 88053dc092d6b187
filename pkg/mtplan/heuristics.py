"""
Seeded sampling: uniform free-space states, heuristic-tree spawning and the
uniform-weight Gaussian mixture fitted over heuristic-tree nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from .forest import Tree, TreeKind
from .interfaces import NoFreeSpaceError
from .kinodynamics import State, wrap_angle
from .logging_config import get_logger
from .workspace.grid import OccupancyGrid, Point, is_free

logger = get_logger(__name__)

DEFAULT_REJECTION_CAP = 100


class SeededRng:
    """
    Single-owner random source backed by numpy's PCG64 bit generator.

    The same seed produces the same draw sequence on every platform numpy
    supports.
    """

    def __init__(self, seed: int):
        """
        Initialize the generator.

        Args:
            seed: Non-negative integer seed (64-bit)
        """
        if seed < 0:
            raise ValueError(f"Seed must be non-negative, got {seed}")
        self._seed = int(seed)
        self._generator = np.random.Generator(np.random.PCG64(self._seed))

    @property
    def seed(self) -> int:
        return self._seed

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return float(self._generator.random())

    def uniform(self, low: float, high: float) -> float:
        """Uniform float in [low, high)."""
        return float(self._generator.uniform(low, high))

    def integers(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self._generator.integers(n))

    def normal(self, mean: np.ndarray, scale: np.ndarray) -> np.ndarray:
        """Independent normal draws, one per element of mean/scale."""
        return self._generator.normal(mean, scale)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self._seed})"


def random_state(grid: OccupancyGrid, rng: SeededRng) -> Point:
    """
    Uniform point over the free cells, by rejection sampling over the whole grid.

    Raises:
        NoFreeSpaceError: If the grid has no free cell
    """
    if grid.free_count == 0:
        raise NoFreeSpaceError(f"Cannot sample free space: {grid!r} is fully occupied")
    while True:
        p = Point(rng.uniform(0.0, grid.width), rng.uniform(0.0, grid.height))
        if is_free(grid, p):
            return p


def spawn_heuristic_tree(
    grid: OccupancyGrid,
    rng: SeededRng,
    at: Optional[Tuple[float, float]] = None,
    use_spatial_index: bool = False,
) -> Tree:
    """
    Create a single-node heuristic tree.

    Args:
        grid: Occupancy grid
        rng: Random source
        at: Root position; a uniform free point is drawn when omitted
        use_spatial_index: Passed to the new tree

    Returns:
        Tree whose root has a uniform heading and zero velocities
    """
    if at is None:
        position = random_state(grid, rng)
    else:
        position = Point(float(at[0]), float(at[1]))
        if not is_free(grid, position):
            raise ValueError(f"Heuristic tree root {tuple(position)} is not in free space")
    theta = wrap_angle(rng.uniform(-math.pi, math.pi))
    return Tree(State(position, theta, 0.0, 0.0), TreeKind.HEURISTIC, use_spatial_index=use_spatial_index)


@dataclass(frozen=True)
class GmmModel:
    """Uniform-weight Gaussian mixture with diagonal covariances."""

    means: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self) -> None:
        means = np.asarray(self.means, dtype=float).reshape(-1, 2)
        sigmas = np.asarray(self.sigmas, dtype=float).reshape(-1, 2)
        if means.shape[0] < 1:
            raise ValueError("A mixture needs at least one component")
        if sigmas.shape != means.shape:
            raise ValueError(f"sigmas shape {sigmas.shape} does not match means shape {means.shape}")
        if not (sigmas > 0).all():
            raise ValueError("Every component standard deviation must be positive")
        means.flags.writeable = False
        sigmas.flags.writeable = False
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigmas", sigmas)

    @property
    def kappa(self) -> int:
        return int(self.means.shape[0])

    @property
    def components(self) -> List[Tuple[Point, Tuple[float, float]]]:
        return [
            (Point(float(m[0]), float(m[1])), (float(s[0]), float(s[1])))
            for m, s in zip(self.means, self.sigmas)
        ]


def fit_gmm(tree: Tree, kappa_max: int, sigma: float) -> GmmModel:
    """
    One isotropic component per selected tree node.

    Every node is used when the tree has at most ``kappa_max`` nodes; otherwise
    nodes ``round(linspace(0, n - 1, kappa_max))`` are used, which keeps the
    first and the last node.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if kappa_max < 1:
        raise ValueError(f"kappa_max must be at least 1, got {kappa_max}")
    n = len(tree)
    k = min(kappa_max, n)
    selected = np.round(np.linspace(0, n - 1, k)).astype(np.intp)
    means = tree.positions[selected].copy()
    return GmmModel(means, np.full_like(means, sigma))


def branch_tree(tree: Tree, start: int, end: int, max_nodes: Optional[int] = None) -> Tree:
    """
    Chain copy of the branch of ``tree`` running from node ``start`` to node ``end``.

    With ``max_nodes`` the chain stops after that many nodes counted from ``start``.
    """
    path = tree.path_between(start, end)
    if max_nodes is not None:
        if max_nodes < 1:
            raise ValueError(f"max_nodes must be at least 1, got {max_nodes}")
        path = path[:max_nodes]
    chain = Tree(tree.nodes[path[0]], tree.kind)
    for parent, index in enumerate(path[1:]):
        chain.add_node(tree.nodes[index], parent)
    return chain


def fit_branch_gmm(
    tree: Tree, start: int, end: int, kappa_max: int, sigma: float, max_nodes: Optional[int] = None
) -> GmmModel:
    """
    Mixture over the branch from ``start`` toward ``end``.

    Components are spread evenly along the branch (cut to ``max_nodes`` when
    given) and always include both of its ends, so the model traces the tree's
    route away from ``start``.
    """
    return fit_gmm(branch_tree(tree, start, end, max_nodes), kappa_max, sigma)


def gmm_pdf(model: GmmModel, p: Union[Tuple[float, float], np.ndarray]) -> Union[float, np.ndarray]:
    """
    Mixture density at one point or at an (m, 2) array of points.

    Each component is the bivariate normal with normalizer 1 / (2 pi sx sy).
    """
    points = np.asarray(p, dtype=float)
    single = points.ndim == 1
    points = points.reshape(-1, 2)
    dx = (points[:, None, 0] - model.means[None, :, 0]) / model.sigmas[None, :, 0]
    dy = (points[:, None, 1] - model.means[None, :, 1]) / model.sigmas[None, :, 1]
    norm = 2.0 * math.pi * model.sigmas[:, 0] * model.sigmas[:, 1]
    density = (np.exp(-0.5 * (dx * dx + dy * dy)) / norm[None, :]).sum(axis=1) / model.kappa
    return float(density[0]) if single else density


def sample_heuristic_state(
    model: GmmModel,
    grid: OccupancyGrid,
    rng: SeededRng,
    rejection_cap: int = DEFAULT_REJECTION_CAP,
) -> Point:
    """
    Draw a free point from the mixture.

    A component is chosen uniformly, then a normal draw is made around its mean;
    out-of-bounds or occupied draws are retried up to ``rejection_cap`` times,
    after which a uniform free point is returned instead.
    """
    for _ in range(rejection_cap):
        j = rng.integers(model.kappa)
        draw = rng.normal(model.means[j], model.sigmas[j])
        p = Point(float(draw[0]), float(draw[1]))
        if is_free(grid, p):
            return p
    logger.debug(f"Heuristic sampling rejected {rejection_cap} draws; falling back to uniform sampling")
    return random_state(grid, rng)
