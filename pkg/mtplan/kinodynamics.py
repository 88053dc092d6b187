"""
Unicycle motion model, admissible control windows, the distance+angle cost and
the candidate-enumerating extend step used by the rooted tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Tuple

from .config_models import KinodynamicParams
from .interfaces import DegenerateInputError
from .workspace.grid import OccupancyGrid, Point, distance, segment_collision_free

if TYPE_CHECKING:
    from .forest import Tree
    from .planners.base import PlanCounters


@dataclass(frozen=True)
class State:
    """Robot configuration: position (px), heading (rad), linear and angular velocity."""

    pos: Point
    theta: float = 0.0
    v: float = 0.0
    omega: float = 0.0

    @classmethod
    def at(cls, p: Tuple[float, float], theta: float = 0.0, v: float = 0.0, omega: float = 0.0) -> State:
        """Build a state from a position tuple."""
        return cls(Point(float(p[0]), float(p[1])), wrap_angle(theta), v, omega)


@dataclass(frozen=True)
class ControlInput:
    """Commanded linear (px/step) and angular (rad/step) velocity."""

    v: float
    omega: float


def wrap_angle(theta: float) -> float:
    """Normalize an angle to [-pi, pi)."""
    wrapped = math.remainder(theta, math.tau)
    if wrapped >= math.pi:
        wrapped -= math.tau
    return wrapped


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def velocity_window(current: float, alpha: float, dt: float, lo: float, hi: float) -> Tuple[float, float]:
    """
    Velocities reachable within one step, clamped to the global bounds.

    Args:
        current: Current velocity
        alpha: Acceleration bound
        dt: Time step
        lo: Global minimum
        hi: Global maximum

    Returns:
        (min, max) with min <= max
    """
    if lo > hi:
        raise ValueError(f"Window bounds out of order: lo={lo} > hi={hi}")
    return _clamp(current - alpha * dt, lo, hi), _clamp(current + alpha * dt, lo, hi)


def discretize(lo: float, hi: float, n: int) -> float:
    """Step size that splits [lo, hi] into n equal fractions."""
    if n < 1:
        raise ValueError(f"Fraction count must be at least 1, got {n}")
    return (hi - lo) / n


def candidate_values(lo: float, hi: float, n: int) -> List[float]:
    """The n + 1 evenly spaced values lo + i * step, i = 0..n."""
    step = discretize(lo, hi, n)
    return [lo + i * step for i in range(n + 1)]


def propagate(x: State, u: ControlInput, dt: float) -> State:
    """Turn-then-translate Euler step of the unicycle model."""
    theta = wrap_angle(x.theta + u.omega * dt)
    step = u.v * dt
    pos = Point(x.pos.h + step * math.cos(theta), x.pos.v + step * math.sin(theta))
    return State(pos, theta, u.v, u.omega)


def cost(
    x_new: State,
    x_rand: Tuple[float, float],
    start: Tuple[float, float],
    goal: Tuple[float, float],
    params: KinodynamicParams,
) -> float:
    """
    Weighted distance and heading deviation of a candidate toward the sample.

    The distance term is normalized by the start-goal distance; the heading term
    is the wrapped difference between the bearing new->rand and the candidate's
    heading.

    Raises:
        DegenerateInputError: If the candidate sits on the sample or start == goal
    """
    scale = distance(start, goal)
    if scale == 0.0:
        raise DegenerateInputError(f"Start and goal coincide at {tuple(start)}")
    if x_new.pos.h == x_rand[0] and x_new.pos.v == x_rand[1]:
        raise DegenerateInputError(f"Candidate position equals the sample {tuple(x_rand)}")
    return _cost_terms(x_new, x_rand, scale, params)


def _cost_terms(x_new: State, x_rand: Tuple[float, float], scale: float, params: KinodynamicParams) -> float:
    d = distance(x_new.pos, x_rand)
    bearing = math.atan2(x_rand[1] - x_new.pos.v, x_rand[0] - x_new.pos.h)
    deviation = wrap_angle(bearing - x_new.theta)
    return params.w1 * (d / scale) + params.w2 * abs(deviation)


def enumerate_candidates(x_near: State, params: KinodynamicParams) -> List[Tuple[ControlInput, State]]:
    """Propagate every discretized control from x_near, linear-velocity index major."""
    v_lo, v_hi = velocity_window(x_near.v, params.alpha_v, params.dt, params.v_min_global, params.v_max_global)
    w_lo, w_hi = velocity_window(
        x_near.omega, params.alpha_omega, params.dt, -params.omega_max_global, params.omega_max_global
    )
    candidates = []
    for v in candidate_values(v_lo, v_hi, params.n_v):
        for omega in candidate_values(w_lo, w_hi, params.n_omega):
            u = ControlInput(v, omega)
            candidates.append((u, propagate(x_near, u, params.dt)))
    return candidates


def candidate_cost(
    candidate: State, x_rand: Tuple[float, float], scale: float, params: KinodynamicParams
) -> float:
    """Cost used inside extend; a candidate exactly on the sample costs 0."""
    if candidate.pos.h == x_rand[0] and candidate.pos.v == x_rand[1]:
        return 0.0
    return _cost_terms(candidate, x_rand, scale, params)


def extend(
    tree: Tree,
    x_rand: Tuple[float, float],
    grid: OccupancyGrid,
    params: KinodynamicParams,
    counters: PlanCounters,
    *,
    start: Tuple[float, float],
    goal: Tuple[float, float],
) -> Optional[State]:
    """
    Grow the tree one kinodynamic step toward x_rand.

    All (n_v + 1) * (n_omega + 1) candidates are evaluated, sorted by cost with
    enumeration order breaking ties, and the cheapest collision-free one is
    added under the nearest node.

    Args:
        tree: Tree to grow (non-empty)
        x_rand: Sample to grow toward
        grid: Occupancy grid
        params: Kinodynamic parameters
        counters: Per-trial counters; invalid_connections is incremented per rejected candidate
        start: Query start position (cost normalizer)
        goal: Query goal position (cost normalizer)

    Returns:
        The added state (now the tree's last node), or None if every candidate collides
    """
    scale = distance(start, goal)
    if scale == 0.0:
        raise DegenerateInputError(f"Start and goal coincide at {tuple(start)}")

    near_index = tree.nearest_neighbor(x_rand)
    x_near = tree.nodes[near_index]
    candidates = enumerate_candidates(x_near, params)
    counters.candidates_evaluated += len(candidates)

    ranked = sorted(
        range(len(candidates)),
        key=lambda k: (candidate_cost(candidates[k][1], x_rand, scale, params), k),
    )
    for k in ranked:
        candidate = candidates[k][1]
        if segment_collision_free(grid, x_near.pos, candidate.pos):
            tree.add_node(candidate, near_index)
            return candidate
        counters.invalid_connections += 1
    return None
