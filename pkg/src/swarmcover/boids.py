"""Flocking forces and the per-robot velocity update.

Five steering terms act on each robot: cohesion, alignment and separation
over radius-limited neighborhoods, a boundary term when the robot strays
outside the workspace, and an obstacle-repulsion term inside the avoidance
radius.  Every nonzero force is normalized to unit length before weighting,
and the accumulated flocking velocity is clamped (not rescaled) to the
maximum speed so a robot can stop.

Near obstacles a distance-based scale shifts authority from cohesion and
alignment to repulsion, so the attraction into the flock cannot cancel the
push away from a wall of boxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

Vec = np.ndarray


@dataclass(frozen=True)
class BoidParams:
    """Per-robot-kind weights, radii and kinematic limits."""

    w_align: float
    w_cohesion: float
    w_separation: float
    w_wall: float
    w_frontier: float
    w_avoid: float
    psi_dist: float
    psi_size: float
    r_align: float
    r_separation: float
    r_cohesion: float
    r_avoid: float
    v_max: float
    omega_max: float
    gain_k: float = 1.0

    def __post_init__(self):
        for name in ("r_align", "r_separation", "r_cohesion", "r_avoid"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.r_separation < self.r_cohesion:
            raise ValueError("r_separation must be smaller than r_cohesion")
        for name in ("w_align", "w_cohesion", "w_separation", "w_wall",
                     "w_frontier", "w_avoid"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


# Default parameter sets for the two supported robot kinds.  The maximum
# angular speed is stated in the source hardware table with an implausible
# degree unit; it is exposed here in rad/s and is configurable per scenario.
BURGER = BoidParams(
    w_align=0.5, w_cohesion=0.23, w_separation=1.1, w_wall=1.1,
    w_frontier=0.08, w_avoid=1.1, psi_dist=0.001, psi_size=1.0,
    r_align=1.5, r_separation=0.65, r_cohesion=1.5, r_avoid=1.7,
    v_max=0.25, omega_max=0.9, gain_k=1.0,
)
P3DX = BoidParams(
    w_align=0.6, w_cohesion=0.21, w_separation=1.2, w_wall=0.05,
    w_frontier=0.03, w_avoid=1.1, psi_dist=0.001, psi_size=1.0,
    r_align=1.5, r_separation=0.85, r_cohesion=1.5, r_avoid=1.7,
    v_max=0.25, omega_max=0.9, gain_k=1.0,
)
PARAM_KINDS = {"burger": BURGER, "p3dx": P3DX}


@dataclass
class RobotState:
    """Pose and flocking state of one robot."""

    id: int
    kind: str
    p: Vec                       # position, meters
    theta: float                 # heading, rad
    v_flock: Vec = field(default_factory=lambda: np.zeros(2))
    active: bool = True
    params: BoidParams = BURGER


def _unit(v: Vec) -> Vec:
    n = math.hypot(v[0], v[1])
    if n == 0.0:
        return np.zeros(2)
    return v / n


def neighbors(self_state: RobotState, all_robots: list[RobotState], radius: float) -> list[RobotState]:
    """Other active robots strictly within ``radius`` of this robot."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    out = []
    for other in all_robots:
        if other.id == self_state.id or not other.active:
            continue
        if math.hypot(other.p[0] - self_state.p[0], other.p[1] - self_state.p[1]) < radius:
            out.append(other)
    return out


def cohesion_force(self_state: RobotState, neigh: list[RobotState]) -> Vec:
    """Vector from the robot to the mean neighbor position; zero when alone."""
    if not neigh:
        return np.zeros(2)
    mean = np.mean([o.p for o in neigh], axis=0)
    return mean - self_state.p


def separation_force(self_state: RobotState, neigh: list[RobotState]) -> Vec:
    """Vector away from the mean position of close neighbors; zero when alone."""
    if not neigh:
        return np.zeros(2)
    mean = np.mean([o.p for o in neigh], axis=0)
    return self_state.p - mean


def alignment_force(self_state: RobotState, neigh: list[RobotState]) -> Vec:
    """Mean flocking velocity of the neighbors; zero when alone."""
    if not neigh:
        return np.zeros(2)
    return np.mean([o.v_flock for o in neigh], axis=0)


def wall_force(self_state: RobotState, env) -> Vec:
    """Out-of-bounds indicator per axis: -1 at or below the lower bound, +1
    at or above the upper bound, 0 strictly inside.

    The boundary belongs to the outer branches because integration clamps
    positions onto it: a robot parked on the fence must still feel the
    restoring push.  Note the sign convention: the vector points *outward*;
    the velocity update applies it with a negative weight.
    """
    px, py = self_state.p[0], self_state.p[1]
    wx = -1.0 if px <= env.x_min else (1.0 if px >= env.x_max else 0.0)
    wy = -1.0 if py <= env.y_min else (1.0 if py >= env.y_max else 0.0)
    return np.array([wx, wy])


def obstacle_avoidance_force(p_ro: Vec | None, r_avoid: float) -> Vec:
    """Repulsion from the nearest sensed obstacle point.

    ``p_ro`` is the relative position robot -> obstacle; the force is its
    negation inside the avoidance radius (boundary included) and zero
    outside or when nothing is sensed.
    """
    if p_ro is None:
        return np.zeros(2)
    if math.hypot(p_ro[0], p_ro[1]) <= r_avoid:
        return -np.asarray(p_ro, dtype=float)
    return np.zeros(2)


def adaptive_weights(params: BoidParams, dist_obstacle: float) -> tuple[float, float, float]:
    """Distance-scaled (w_avoid', w_align', w_cohesion').

    The repulsive scale delta grows linearly as the obstacle gets closer than
    the avoidance radius; cohesion and alignment fade out and vanish at
    delta >= 0.5.  With no obstacle in range delta clamps to zero and the
    weights are unchanged.  Pass ``math.inf`` when nothing is sensed.
    """
    delta = (params.r_avoid - dist_obstacle) / params.r_cohesion
    delta = max(delta, 0.0)
    fade = max(1.0 - 2.0 * delta, 0.0)
    return (params.w_avoid * delta,
            params.w_align * fade,
            params.w_cohesion * fade)


def clamp_speed(v: Vec, v_max: float) -> Vec:
    n = math.hypot(v[0], v[1])
    if n > v_max:
        return v * (v_max / n)
    return v


def flock_velocity_update(self_state: RobotState,
                          cohesion_neigh: list[RobotState],
                          align_neigh: list[RobotState],
                          separation_positions: list[Vec],
                          env,
                          p_ro: Vec | None,
                          dt: float = 1.0) -> Vec:
    """One flocking velocity step for a single robot.

    The weighted unit steering forces integrate into the velocity as
    accelerations over ``dt`` (the weights are per-second rates; at the
    control period the velocity evolves smoothly instead of snapping to the
    strongest force), and the result clamps to the speed limit.

    ``separation_positions`` are the positions of everything the separation
    rule reacts to (active neighbors and sensed inactive robots alike).
    Returns the new flocking velocity; the caller stores it on the state.
    """
    params = self_state.params
    dist_obstacle = math.hypot(p_ro[0], p_ro[1]) if p_ro is not None else math.inf
    w_avoid, w_align, w_cohesion = adaptive_weights(params, dist_obstacle)

    force = np.zeros(2)
    force += w_cohesion * _unit(cohesion_force(self_state, cohesion_neigh))
    force += w_align * _unit(alignment_force(self_state, align_neigh))
    if separation_positions:
        mean = np.mean(separation_positions, axis=0)
        force += params.w_separation * _unit(self_state.p - mean)

    v_avoid = obstacle_avoidance_force(p_ro, params.r_avoid)
    if v_avoid[0] != 0.0 or v_avoid[1] != 0.0:
        force += w_avoid * _unit(v_avoid)
    else:
        v_wall = wall_force(self_state, env)
        if v_wall[0] != 0.0 or v_wall[1] != 0.0:
            # Outward indicator applied negatively: restoring push.
            force -= params.w_wall * _unit(v_wall)

    v = self_state.v_flock.astype(float) + dt * force
    return clamp_speed(v, params.v_max)
