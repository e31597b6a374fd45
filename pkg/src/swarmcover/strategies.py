"""Per-step velocity policies for the five evaluated strategies.

* ``frontier_swarm`` — flocking plus weighted attraction to the chosen
  frontier region (the proposed algorithm).
* ``frontier_only``  — separation and frontier attraction only, with wall
  and obstacle avoidance kept as safety terms.
* ``greedy_swarm``   — flocking plus attraction to the nearest unexplored
  cell instead of a frontier region.
* ``swarm_only``     — flocking alone, no map-driven attraction.
* ``routing``        — precomputed boustrophedon sweep with a waypoint
  pursuit controller; obstacle-free environments only.

These functions are the per-robot reference semantics; the simulation engine
vectorizes the same math over all robots and is cross-checked against this
module in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import boids
from .boids import RobotState, clamp_speed
from .coverage import CoverageMap
from .environment import Environment, ScenarioError, cell_center, grid_dims
from .frontier import FrontierRegion, frontier_velocity
from . import kernels

STRATEGIES = ("frontier_swarm", "frontier_only", "greedy_swarm", "swarm_only", "routing")


def validate_strategy(tag: str) -> str:
    if tag not in STRATEGIES:
        raise ScenarioError(f"unknown strategy {tag!r}; expected one of {STRATEGIES}")
    return tag


@dataclass
class StepContext:
    """Everything a policy may consume for one robot on one step."""

    env: Environment
    cohesion_neigh: list[RobotState]
    align_neigh: list[RobotState]
    separation_positions: list[np.ndarray]
    p_ro: np.ndarray | None           # relative vector to nearest sensed obstacle
    chosen_region: FrontierRegion | None
    greedy_target: tuple[float, float] | None = None
    dt: float = 1.0

    def separation_vector(self, robot: RobotState) -> np.ndarray:
        if not self.separation_positions:
            return np.zeros(2)
        mean = np.mean(self.separation_positions, axis=0)
        return robot.p - mean


def _unit(v: np.ndarray) -> np.ndarray:
    n = math.hypot(v[0], v[1])
    if n == 0.0:
        return np.zeros(2)
    return v / n


def _clamp(v: np.ndarray, v_max: float) -> np.ndarray:
    n = math.hypot(v[0], v[1])
    if n > v_max:
        return v * (v_max / n)
    return v


def frontier_swarm_step(robot: RobotState, ctx: StepContext) -> np.ndarray:
    """Fused velocity: updated flocking velocity plus the raw frontier pull.

    The pull is the displacement to the chosen region's centroid, fused
    unweighted: meters in magnitude, it dominates the command whenever the
    separation gate is open, so an uncrowded robot beelines to the frontier
    while its crowded flockmates keep flocking.
    """
    v_flock = boids.flock_velocity_update(
        robot, ctx.cohesion_neigh, ctx.align_neigh,
        ctx.separation_positions, ctx.env, ctx.p_ro, ctx.dt)
    robot.v_flock = v_flock
    v_f = frontier_velocity(ctx.chosen_region, robot.p, ctx.separation_vector(robot))
    return _clamp(v_flock + v_f, robot.params.v_max)


def frontier_only_step(robot: RobotState, ctx: StepContext) -> np.ndarray:
    """Flocking update with cohesion and alignment dropped (separation and
    the wall/obstacle safety terms remain), fused with the raw frontier
    pull."""
    v_flock = boids.flock_velocity_update(
        robot, [], [], ctx.separation_positions, ctx.env, ctx.p_ro, ctx.dt)
    robot.v_flock = v_flock
    v_f = frontier_velocity(ctx.chosen_region, robot.p, ctx.separation_vector(robot))
    return _clamp(v_flock + v_f, robot.params.v_max)


def greedy_nearest_cell(m: CoverageMap, current: tuple[int, int]) -> tuple[int, int] | None:
    """Unexplored cell nearest to ``current`` in Euclidean cell distance,
    ties lexicographic on (X, Y); None when the map has none left."""
    x, y = kernels.greedy_nearest(m.cells, current[0], current[1])
    if x < 0:
        return None
    return (x, y)


def greedy_swarm_step(robot: RobotState, ctx: StepContext) -> np.ndarray:
    """Flocking plus attraction toward the nearest unexplored cell.

    The attraction is gated by separation exactly like the frontier pull:
    robots converging on the same cell break off rather than collide.  The
    pull is normalized and scaled by the attraction weight; unlike the
    frontier velocity there is no raw-displacement fusion for it.
    """
    v_flock = boids.flock_velocity_update(
        robot, ctx.cohesion_neigh, ctx.align_neigh,
        ctx.separation_positions, ctx.env, ctx.p_ro, ctx.dt)
    robot.v_flock = v_flock
    v_r = v_flock.copy()
    v_s = ctx.separation_vector(robot)
    if ctx.greedy_target is not None and v_s[0] == 0.0 and v_s[1] == 0.0:
        pull = np.array([ctx.greedy_target[0] - robot.p[0],
                         ctx.greedy_target[1] - robot.p[1]])
        v_r = v_r + robot.params.w_frontier * _unit(pull)
    return _clamp(v_r, robot.params.v_max)


def swarm_only_step(robot: RobotState, ctx: StepContext) -> np.ndarray:
    """Pure flocking; never reads the coverage map."""
    v_flock = boids.flock_velocity_update(
        robot, ctx.cohesion_neigh, ctx.align_neigh,
        ctx.separation_positions, ctx.env, ctx.p_ro, ctx.dt)
    robot.v_flock = v_flock
    return v_flock.copy()


# ---------------------------------------------------------------------------
# Routing: boustrophedon sweep plan + pursuit controller
# ---------------------------------------------------------------------------

@dataclass
class SweepPlan:
    """Per-robot serpentine waypoint lists covering the grid exactly once."""

    bands: list[list[tuple[int, int]]]          # per robot: ordered cell list
    waypoints: list[np.ndarray] = field(default_factory=list)  # per robot: [K, 2] centers

    @property
    def n_robots(self) -> int:
        return len(self.bands)


def plan_sweep(env: Environment, n_robots: int) -> SweepPlan:
    """Partition the grid rows into contiguous bands balanced within one row
    and sweep each band back and forth.

    Rejects environments with obstacles: the sweep assumes every cell is
    traversable.
    """
    if env.obstacles:
        raise ScenarioError("routing sweep requires an obstacle-free environment")
    dim_x, dim_y = grid_dims(env)
    if n_robots < 1:
        raise ScenarioError("routing needs at least one robot")
    if n_robots > dim_y:
        raise ScenarioError(f"more robots ({n_robots}) than sweep rows ({dim_y})")

    base = dim_y // n_robots
    extra = dim_y % n_robots
    sizes = [base + 1 if r < extra else base for r in range(n_robots)]

    bands: list[list[tuple[int, int]]] = []
    row = 0
    for size in sizes:
        cells: list[tuple[int, int]] = []
        for j in range(size):
            y = row + j
            xs = range(dim_x) if j % 2 == 0 else range(dim_x - 1, -1, -1)
            cells.extend((x, y) for x in xs)
        bands.append(cells)
        row += size

    waypoints = []
    for cells in bands:
        pts = np.array([cell_center(env, c) for c in cells], dtype=float)
        waypoints.append(pts)
    return SweepPlan(bands=bands, waypoints=waypoints)


# Pursuit tuning: pivot in place when the waypoint sits more than this far
# off the current heading, so turns do not swing through neighboring cells.
PIVOT_ANGLE = 0.6
PIVOT_SPEED = 0.01


def pursuit_velocity(p: np.ndarray, theta: float, waypoint: np.ndarray,
                     v_max: float) -> np.ndarray:
    """Desired velocity toward the waypoint: full speed when roughly aligned,
    a creep (pure pivot through the heading controller) otherwise."""
    d = waypoint - p
    dist = math.hypot(d[0], d[1])
    if dist == 0.0:
        return np.zeros(2)
    desired = math.atan2(d[1], d[0])
    err = (desired - theta) % (2.0 * math.pi)
    if err > math.pi:
        err -= 2.0 * math.pi
    speed = v_max if abs(err) <= PIVOT_ANGLE else PIVOT_SPEED
    return d * (speed / dist)
