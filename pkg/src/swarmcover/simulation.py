"""Discrete-time world: unicycle kinematics, range sensing, noise, failures,
radius-gated map exchange and run orchestration.

One step runs, in order: sense (lidar, obstacle marking, own-cell
correction), exchange (map merge + liveness bookkeeping), strategy
velocities, the unicycle command, integration, coverage marking, metric
sampling, the failure schedule and the termination check.  All randomness
flows from a single seeded generator with a fixed draw order, so a
(scenario, seed) pair reruns to an identical trace.

The engine is vectorized over robots; the per-robot reference semantics live
in ``boids`` and ``strategies`` and the tests cross-check the two paths.
"""

from __future__ import annotations

import json
import math
import time as _time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .boids import PARAM_KINDS, BoidParams
from .coverage import (COVERED, OBSTACLE, UNEXPLORED, CoverageMap,
                       coverage_fraction, init_map, rle_encode)
from .environment import Environment, ScenarioError, grid_dims
from .frontier import FrontierCache, find_frontier_regions, select_frontier
from .strategies import SweepPlan, plan_sweep, validate_strategy

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Scenario configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseConfig:
    lidar_std_m: float = 0.0
    position_std_m: float = 0.0


@dataclass(frozen=True)
class FailureConfig:
    period_s: float = 30.0
    count: int = 2


@dataclass(frozen=True)
class CommConfig:
    radius_m: float = 1.5
    exchange_interval_s: float = 0.02
    liveness_timeout_s: float = 3.0


@dataclass(frozen=True)
class SensorConfig:
    n_rays: int = 72
    max_range_m: float = 3.5
    body_radius_m: float = 0.15
    mark_range_m: float = 3.5


@dataclass(frozen=True)
class MetricConfig:
    interval_s: float = 1.0
    n_samples: int = 15


@dataclass(frozen=True)
class RobotSpec:
    kind: str
    x: float
    y: float
    theta: float = 0.0


@dataclass(frozen=True)
class Scenario:
    name: str
    env: Environment
    robots: tuple[RobotSpec, ...]
    strategy: str
    dt: float = 0.02
    time_budget: float = 600.0
    seed: int = 0
    noise: NoiseConfig = NoiseConfig()
    failures: FailureConfig | None = None
    comm: CommConfig = CommConfig()
    sensor: SensorConfig = SensorConfig()
    metrics: MetricConfig = MetricConfig()
    frontier_period_s: float = 0.02
    swarm_jitter_rad: float = 0.05
    map_snapshot_every: int = 50
    param_overrides: tuple[tuple[str, tuple[tuple[str, float], ...]], ...] = ()

    def __post_init__(self):
        validate_strategy(self.strategy)
        if self.dt <= 0:
            raise ScenarioError("dt_s must be positive")
        if self.time_budget <= 0:
            raise ScenarioError("time_budget_s must be positive")
        if not self.robots:
            raise ScenarioError("robots must be non-empty")
        if self.strategy == "routing" and self.env.obstacles:
            raise ScenarioError("routing strategy requires an obstacle-free environment")

    def params_for(self, kind: str) -> BoidParams:
        if kind not in PARAM_KINDS:
            raise ScenarioError(f"unknown robot kind {kind!r}; expected one of "
                                f"{sorted(PARAM_KINDS)}")
        params = PARAM_KINDS[kind]
        overrides = dict(self.param_overrides).get(kind)
        if overrides:
            from dataclasses import replace
            params = replace(params, **dict(overrides))
        return params


@dataclass
class RunResult:
    """Metrics record for one completed run."""

    scenario: str
    strategy: str
    seed: int
    cp: float                 # coverage percentage, 0..100
    tt: float                 # turnaround time, simulated seconds
    group: float              # position spread about the centroid, m
    order: float              # velocity spread about the mean, m/s
    timed_out: bool
    collisions: int = 0
    corrections: int = 0
    metric_samples: int = 0
    completer: int | None = None
    cp_series: list[tuple[float, float]] = field(default_factory=list)
    wall_s: float = 0.0


# ---------------------------------------------------------------------------
# Kinematics (per-robot reference; the engine vectorizes the same math)
# ---------------------------------------------------------------------------

def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = a % _TWO_PI
    if w > math.pi:
        w -= _TWO_PI
    return w


def unicycle_command(v_r, theta: float, k: float, v_max: float,
                     omega_max: float) -> tuple[float, float]:
    """Linear/angular command tracking a desired planar velocity."""
    speed = math.hypot(v_r[0], v_r[1])
    v = min(speed, v_max)
    if speed == 0.0:
        return 0.0, 0.0
    err = wrap_angle(math.atan2(v_r[1], v_r[0]) - theta)
    omega = max(-omega_max, min(omega_max, k * err))
    return v, omega


def integrate(p, theta: float, v: float, omega: float, dt: float,
              env: Environment) -> tuple[np.ndarray, float]:
    """Advance a unicycle one step; the position clamps to the bounds."""
    theta_new = wrap_angle(theta + omega * dt)
    x = p[0] + v * dt * math.cos(theta_new)
    y = p[1] + v * dt * math.sin(theta_new)
    x = min(max(x, env.x_min), env.x_max)
    y = min(max(y, env.y_min), env.y_max)
    return np.array([x, y]), theta_new


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

def _unit_rows(v: np.ndarray) -> np.ndarray:
    norms = np.hypot(v[:, 0], v[:, 1])
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return v * scale[:, None]


class Simulation:
    """Vectorized stepping kernel for one scenario."""

    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.env = scenario.env
        self.dims = grid_dims(self.env)
        self.n = len(scenario.robots)
        self.occ = self.env.obstacle_mask().astype(np.uint8)
        self.free_mask = ~self.env.obstacle_mask()
        self.obstacle_cells = np.array(sorted(self.env.obstacles), dtype=float) \
            if self.env.obstacles else np.zeros((0, 2))

        kinds = [r.kind for r in scenario.robots]
        self.params = [scenario.params_for(k) for k in kinds]
        self.kinds = kinds
        p = self.params
        self.w_align = np.array([q.w_align for q in p])
        self.w_cohesion = np.array([q.w_cohesion for q in p])
        self.w_separation = np.array([q.w_separation for q in p])
        self.w_wall = np.array([q.w_wall for q in p])
        self.w_frontier = np.array([q.w_frontier for q in p])
        self.w_avoid = np.array([q.w_avoid for q in p])
        self.r_align = np.array([q.r_align for q in p])
        self.r_separation = np.array([q.r_separation for q in p])
        self.r_cohesion = np.array([q.r_cohesion for q in p])
        self.r_avoid = np.array([q.r_avoid for q in p])
        self.v_max = np.array([q.v_max for q in p])
        self.omega_max = np.array([q.omega_max for q in p])
        self.gain_k = np.array([q.gain_k for q in p])

        self.pos = np.array([[r.x, r.y] for r in scenario.robots], dtype=float)
        self.theta = np.array([r.theta for r in scenario.robots], dtype=float)
        self.v_flock = np.zeros((self.n, 2))
        self.active = np.ones(self.n, dtype=bool)
        self._validate_starts()

        self.maps = [init_map(self.dims, owner=i) for i in range(self.n)]
        self.union = init_map(self.dims, owner=-1)
        self.last_heard = np.full((self.n, self.n), -np.inf)
        np.fill_diagonal(self.last_heard, np.inf)
        self.merged_version = np.full((self.n, self.n), -1, dtype=np.int64)

        self.cache = FrontierCache()
        self.target = np.zeros((self.n, 2))
        self.has_target = np.zeros(self.n, dtype=bool)
        self.frontier_empty = np.zeros(self.n, dtype=bool)
        self.frontier_checked = np.zeros(self.n, dtype=bool)

        self.plan: SweepPlan | None = None
        self.cursor = np.zeros(self.n, dtype=np.int64)
        if scenario.strategy == "routing":
            self.plan = plan_sweep(self.env, self.n)

        self.rng = np.random.default_rng(scenario.seed)
        self.frontier_steps = max(1, round(scenario.frontier_period_s / scenario.dt))
        self.exchange_steps = max(1, round(scenario.comm.exchange_interval_s / scenario.dt))
        self.metric_steps = max(1, round(scenario.metrics.interval_s / scenario.dt))
        self.period_steps = (max(1, round(scenario.failures.period_s / scenario.dt))
                             if scenario.failures else 0)

        eps = self.env.epsilon
        # Cells whose interior can possibly come within a body radius of an
        # obstacle rectangle; used to prefilter the collision check.
        if self.env.obstacles:
            dist_cells = _chebyshev_cell_distance(self.occ)
            limit = (scenario.sensor.body_radius_m / eps) + 1.0
            self.near_obstacle = dist_cells <= limit
        else:
            self.near_obstacle = np.zeros(self.dims, dtype=bool)

    # -- setup ------------------------------------------------------------

    def _validate_starts(self):
        body = self.sc.sensor.body_radius_m
        for i, r in enumerate(self.sc.robots):
            if not (self.env.x_min <= r.x <= self.env.x_max
                    and self.env.y_min <= r.y <= self.env.y_max):
                raise ScenarioError(f"robot {i} start ({r.x}, {r.y}) out of bounds")
            cell = self._cell_of(r.x, r.y)
            if cell in self.env.obstacles:
                raise ScenarioError(f"robot {i} starts inside obstacle cell {cell}")
        if self.n > 1:
            d = self.pos[None, :, :] - self.pos[:, None, :]
            dist = np.hypot(d[..., 0], d[..., 1])
            np.fill_diagonal(dist, np.inf)
            if dist.min() < 2 * body:
                i, j = np.unravel_index(np.argmin(dist), dist.shape)
                raise ScenarioError(f"robots {i} and {j} start in collision "
                                    f"({dist.min():.3f} m apart)")

    def _cell_of(self, x: float, y: float) -> tuple[int, int]:
        eps = self.env.epsilon
        cx = min(int((x - self.env.x_min) / eps), self.dims[0] - 1)
        cy = min(int((y - self.env.y_min) / eps), self.dims[1] - 1)
        return cx, cy

    def _cells_of(self, xy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        eps = self.env.epsilon
        cx = np.minimum(((xy[:, 0] - self.env.x_min) / eps).astype(np.int64),
                        self.dims[0] - 1)
        cy = np.minimum(((xy[:, 1] - self.env.y_min) / eps).astype(np.int64),
                        self.dims[1] - 1)
        return np.maximum(cx, 0), np.maximum(cy, 0)

    # -- per-step pieces ---------------------------------------------------

    def _mark_traversed(self, i: int, cx: int, cy: int, step: int,
                        trace: list | None) -> None:
        m = self.maps[i]
        state = m.cells[cx, cy]
        if state == COVERED:
            return
        if state == OBSTACLE:
            self.corrections += 1
            if trace is not None:
                trace.append(json.dumps(
                    {"type": "correction", "step": step, "id": i,
                     "cell": [int(cx), int(cy)]}, sort_keys=True))
        m.cells[cx, cy] = COVERED
        m.version += 1

    def _sense(self, step: int, trace: list | None):
        sc = self.sc
        sensor = sc.sensor
        ranges, kinds, hcx, hcy = kernels.lidar_scan(
            self.occ, self.env.x_min, self.env.y_min, self.env.epsilon,
            self.pos[:, 0], self.pos[:, 1], self.theta,
            sensor.n_rays, sensor.max_range_m, sensor.body_radius_m)

        if sc.noise.lidar_std_m > 0:
            noise = self.rng.normal(0.0, sc.noise.lidar_std_m,
                                    size=(self.n, sensor.n_rays))
            hit = kinds != 0
            noisy = np.where(hit, np.clip(ranges + noise, 1e-6, sensor.max_range_m),
                             ranges)
        else:
            noisy = ranges

        step_ang = _TWO_PI / sensor.n_rays
        bear = self.theta[:, None] + step_ang * np.arange(sensor.n_rays)[None, :]

        # Nearest sensed obstacle per robot (robot bodies excluded).
        obst = kinds == 1
        obst_ranges = np.where(obst, noisy, np.inf)
        nearest = np.argmin(obst_ranges, axis=1)
        rows = np.arange(self.n)
        self.p_ro_dist = obst_ranges[rows, nearest]
        ang = bear[rows, nearest]
        self.p_ro_vec = np.where(
            np.isfinite(self.p_ro_dist)[:, None],
            np.stack([self.p_ro_dist * np.cos(ang),
                      self.p_ro_dist * np.sin(ang)], axis=1),
            0.0)
        self.p_ro_dist = np.where(self.active, self.p_ro_dist, np.inf)

        # Obstacle-cell marking on each scanning robot's own map.
        mark = obst & (noisy <= sensor.mark_range_m)
        eps = self.env.epsilon
        for i in np.nonzero(self.active)[0]:
            sel = np.nonzero(mark[i])[0]
            if sel.size == 0:
                continue
            if sc.noise.lidar_std_m > 0:
                # Noisy hit point, nudged along the ray so a zero-error hit
                # still lands inside the struck cell.
                hx = self.pos[i, 0] + (noisy[i, sel] + eps * 1e-6) * np.cos(bear[i, sel])
                hy = self.pos[i, 1] + (noisy[i, sel] + eps * 1e-6) * np.sin(bear[i, sel])
                cx = np.floor((hx - self.env.x_min) / eps).astype(np.int64)
                cy = np.floor((hy - self.env.y_min) / eps).astype(np.int64)
                ok = (cx >= 0) & (cx < self.dims[0]) & (cy >= 0) & (cy < self.dims[1])
                cx, cy = cx[ok], cy[ok]
            else:
                cx, cy = hcx[i, sel].astype(np.int64), hcy[i, sel].astype(np.int64)
            m = self.maps[i]
            changed = m.cells[cx, cy] != OBSTACLE
            if changed.any():
                m.cells[cx[changed], cy[changed]] = OBSTACLE
                m.version += 1

        # Traversal correction on the robot's current cell: the wheels
        # outrank a stale obstacle mark, and doing it before the exchange
        # keeps a re-infected own cell from blinding the frontier search.
        bx, by = self._cells_of(self.believed)
        for i in np.nonzero(self.active)[0]:
            self._mark_traversed(i, int(bx[i]), int(by[i]), step, trace)

    def _exchange(self, t: float):
        comm = self.sc.comm
        d = self.pos[None, :, :] - self.pos[:, None, :]
        dist = np.hypot(d[..., 0], d[..., 1])
        np.fill_diagonal(dist, np.inf)
        pair = (dist < comm.radius_m) & self.active[:, None] & self.active[None, :]
        if not pair.any():
            return
        heard_i, heard_j = np.nonzero(pair)
        self.last_heard[heard_i, heard_j] = t

        versions = np.array([m.version for m in self.maps], dtype=np.int64)
        need = pair & (self.merged_version < versions[None, :])
        if not need.any():
            return
        # Snapshot step-start contents of every map being read this round:
        # gossip moves one hop per exchange.
        sources = np.unique(np.nonzero(need)[1])
        snaps = {int(j): self.maps[j].cells.copy() for j in sources}
        snap_versions = {int(j): int(versions[j]) for j in sources}
        for i in np.unique(np.nonzero(need)[0]):
            peers = np.nonzero(need[i])[0]
            m = self.maps[i]
            merged = m.cells
            for j in peers:
                merged = np.maximum(merged, snaps[int(j)])
                self.merged_version[i, j] = snap_versions[int(j)]
            if not np.array_equal(merged, m.cells):
                m.cells[...] = merged
                m.version += 1

    def _refresh_frontiers(self):
        """Recompute frontier (or greedy) targets and completion flags."""
        sc = self.sc
        self.cache.rotate()
        bx, by = self._cells_of(self.believed)
        use_frontier = sc.strategy in ("frontier_swarm", "frontier_only")
        use_greedy = sc.strategy == "greedy_swarm"
        self.frontier_checked[:] = False
        for i in np.nonzero(self.active)[0]:
            fs = find_frontier_regions(self.maps[i], (int(bx[i]), int(by[i])),
                                       self.env, self.cache)
            self.frontier_empty[i] = fs.empty
            self.frontier_checked[i] = True
            if use_frontier:
                chosen = select_frontier(fs, self.believed[i], self.params[i], self.env)
                if chosen is None:
                    self.has_target[i] = False
                else:
                    self.has_target[i] = True
                    self.target[i] = chosen.centroid
            elif use_greedy:
                cell = kernels.greedy_nearest(self.maps[i].cells, int(bx[i]), int(by[i]))
                if cell[0] < 0:
                    self.has_target[i] = False
                else:
                    self.has_target[i] = True
                    self.target[i] = (self.env.x_min + (cell[0] + 0.5) * self.env.epsilon,
                                      self.env.y_min + (cell[1] + 0.5) * self.env.epsilon)

    def _flock_update(self) -> np.ndarray:
        """Vectorized Reynolds update; returns the raw separation vectors.

        The weighted unit forces integrate into the flocking velocity as
        accelerations over one control period, then the speed clamps.
        """
        believed = self.believed
        d = believed[None, :, :] - believed[:, None, :]
        dist = np.hypot(d[..., 0], d[..., 1])
        np.fill_diagonal(dist, np.inf)

        heard = (self.t - self.last_heard) < self.sc.comm.liveness_timeout_s
        peer_ok = self.active[None, :] & heard
        coh_mask = (dist < self.r_cohesion[:, None]) & peer_ok
        ali_mask = (dist < self.r_align[:, None]) & peer_ok
        sep_mask = dist < self.r_separation[:, None]  # bodies, active or not

        def masked_mean(mask, values):
            counts = mask.sum(axis=1)
            sums = mask.astype(float) @ values
            out = np.zeros_like(sums)
            nz = counts > 0
            out[nz] = sums[nz] / counts[nz, None]
            return out, nz

        coh_mean, coh_nz = masked_mean(coh_mask, believed)
        v_c = np.where(coh_nz[:, None], coh_mean - believed, 0.0)
        ali_mean, ali_nz = masked_mean(ali_mask, self.v_flock)
        v_a = np.where(ali_nz[:, None], ali_mean, 0.0)
        sep_mean, sep_nz = masked_mean(sep_mask, believed)
        v_s = np.where(sep_nz[:, None], believed - sep_mean, 0.0)
        self.v_sep = v_s

        delta = np.maximum((self.r_avoid - self.p_ro_dist) / self.r_cohesion, 0.0)
        fade = np.maximum(1.0 - 2.0 * delta, 0.0)
        w_avoid_eff = self.w_avoid * delta
        self.w_avoid_eff = w_avoid_eff

        # Frontier-only drops cohesion and alignment but keeps the
        # separation and safety terms of the update.
        flocking = self.sc.strategy != "frontier_only"
        force = np.zeros((self.n, 2))
        if flocking:
            force += (self.w_cohesion * fade)[:, None] * _unit_rows(v_c)
            force += (self.w_align * fade)[:, None] * _unit_rows(v_a)
        force += self.w_separation[:, None] * _unit_rows(v_s)

        use_avoid = self.p_ro_dist <= self.r_avoid
        avoid_term = w_avoid_eff[:, None] * _unit_rows(-self.p_ro_vec)
        wall = np.zeros((self.n, 2))
        wall[:, 0] = np.where(believed[:, 0] <= self.env.x_min, -1.0,
                              np.where(believed[:, 0] >= self.env.x_max, 1.0, 0.0))
        wall[:, 1] = np.where(believed[:, 1] <= self.env.y_min, -1.0,
                              np.where(believed[:, 1] >= self.env.y_max, 1.0, 0.0))
        wall_term = -self.w_wall[:, None] * _unit_rows(wall)
        force += np.where(use_avoid[:, None], avoid_term, wall_term)

        v = self.v_flock + self.sc.dt * force
        speeds = np.hypot(v[:, 0], v[:, 1])
        over = speeds > self.v_max
        v[over] *= (self.v_max[over] / speeds[over])[:, None]

        updated = self.active[:, None]
        self.v_flock = np.where(updated, v, self.v_flock)
        return v_s

    def _desired_velocities(self) -> np.ndarray:
        sc = self.sc
        believed = self.believed
        if sc.strategy == "routing":
            v_r = np.zeros((self.n, 2))
            from .strategies import pursuit_velocity
            for i in range(self.n):
                if not self.active[i]:
                    continue
                pts = self.plan.waypoints[i]
                if self.cursor[i] < len(pts) and (
                        math.hypot(*(pts[self.cursor[i]] - believed[i]))
                        < self.env.epsilon / 2):
                    self.cursor[i] = min(self.cursor[i] + 1, len(pts))
                if self.cursor[i] >= len(pts):
                    continue
                v_r[i] = pursuit_velocity(believed[i], self.theta[i],
                                          pts[self.cursor[i]], self.v_max[i])
            return v_r

        # Swarm-only carries a small random heading perturbation of the
        # flocking state so a perfectly symmetric flock cannot stall.
        if sc.strategy == "swarm_only" and sc.swarm_jitter_rad > 0:
            half = sc.swarm_jitter_rad * math.sqrt(3.0)
            ang = np.where(self.active, self.rng.uniform(-half, half, size=self.n), 0.0)
            ca, sa = np.cos(ang), np.sin(ang)
            self.v_flock = np.stack(
                [ca * self.v_flock[:, 0] - sa * self.v_flock[:, 1],
                 sa * self.v_flock[:, 0] + ca * self.v_flock[:, 1]], axis=1)

        v_s = self._flock_update()
        gate_open = (v_s[:, 0] == 0.0) & (v_s[:, 1] == 0.0)
        if sc.strategy == "greedy_swarm":
            # Weighted unit attraction toward the nearest unexplored cell.
            pull = np.where((self.has_target & gate_open)[:, None],
                            self.w_frontier[:, None]
                            * _unit_rows(self.target - believed), 0.0)
        else:
            # Raw displacement to the chosen region centroid: meters in
            # magnitude, it dominates the command when the gate is open.
            pull = np.where((self.has_target & gate_open)[:, None],
                            self.target - believed, 0.0)

        if sc.strategy in ("frontier_swarm", "greedy_swarm", "frontier_only"):
            v_r = self.v_flock + pull
        elif sc.strategy == "swarm_only":
            v_r = self.v_flock.copy()
        else:  # pragma: no cover - validated at construction
            raise AssertionError(sc.strategy)

        speeds = np.hypot(v_r[:, 0], v_r[:, 1])
        over = speeds > self.v_max
        v_r[over] *= (self.v_max[over] / speeds[over])[:, None]
        return np.where(self.active[:, None], v_r, 0.0)

    def _check_collisions(self) -> int:
        events = 0
        body = self.sc.sensor.body_radius_m
        if self.n > 1:
            d = self.pos[None, :, :] - self.pos[:, None, :]
            dist = np.hypot(d[..., 0], d[..., 1])
            iu = np.triu_indices(self.n, k=1)
            events += int(np.count_nonzero(dist[iu] < 2 * body))
        if self.obstacle_cells.size:
            cx, cy = self._cells_of(self.pos)
            near = self.near_obstacle[cx, cy]
            for i in np.nonzero(near)[0]:
                eps = self.env.epsilon
                lo = self.env.x_min + self.obstacle_cells[:, 0] * eps
                lo_y = self.env.y_min + self.obstacle_cells[:, 1] * eps
                ddx = np.maximum(np.maximum(lo - self.pos[i, 0],
                                            self.pos[i, 0] - (lo + eps)), 0.0)
                ddy = np.maximum(np.maximum(lo_y - self.pos[i, 1],
                                            self.pos[i, 1] - (lo_y + eps)), 0.0)
                if np.min(np.hypot(ddx, ddy)) < body:
                    events += 1
        return events

    def _union_cp(self) -> float:
        stack = self.maps[0].cells.copy()
        for m in self.maps[1:]:
            np.maximum(stack, m.cells, out=stack)
        self.union.cells = stack
        return coverage_fraction(self.union, self.free_mask) * 100.0

    # -- main loop ----------------------------------------------------------

    def run(self, trace: list | None = None) -> RunResult:
        sc = self.sc
        wall_start = _time.perf_counter()
        if trace is not None:
            trace.append(json.dumps(
                {"type": "header", "scenario": sc.name, "strategy": sc.strategy,
                 "seed": sc.seed, "dt": sc.dt, "dims": list(self.dims),
                 "n_robots": self.n, "kernels": kernels.IMPL}, sort_keys=True))

        self.corrections = 0
        collisions = 0
        t0_step: int | None = None
        sample_steps: set[int] = set()
        g_samples: list[float] = []
        o_samples: list[float] = []
        cp_series: list[tuple[float, float]] = []
        terminated = False
        timed_out = False
        completer = None
        tt = sc.time_budget
        n_steps = int(math.ceil(sc.time_budget / sc.dt))

        for step in range(n_steps):
            self.t = step * sc.dt

            if sc.noise.position_std_m > 0:
                noise = self.rng.normal(0.0, sc.noise.position_std_m, size=(self.n, 2))
            else:
                noise = np.zeros((self.n, 2))
            self.believed = np.clip(
                self.pos + noise,
                [self.env.x_min, self.env.y_min],
                [self.env.x_max, self.env.y_max])

            self._sense(step, trace)
            if step % self.exchange_steps == 0:
                self._exchange(self.t)
            if step % self.frontier_steps == 0:
                self._refresh_frontiers()

            v_r = self._desired_velocities()

            # Unicycle command: Eq-style heading tracking with clamps.
            speeds = np.hypot(v_r[:, 0], v_r[:, 1])
            v_cmd = np.minimum(speeds, self.v_max)
            desired = np.arctan2(v_r[:, 1], v_r[:, 0])
            err = (desired - self.theta) % _TWO_PI
            err = np.where(err > math.pi, err - _TWO_PI, err)
            omega = np.clip(self.gain_k * err, -self.omega_max, self.omega_max)
            zero = speeds == 0.0
            omega[zero] = 0.0
            v_cmd[zero] = 0.0
            v_cmd = np.where(self.active, v_cmd, 0.0)
            omega = np.where(self.active, omega, 0.0)

            # Integrate and clamp into bounds.
            self.theta = (self.theta + omega * sc.dt) % _TWO_PI
            self.theta = np.where(self.theta > math.pi, self.theta - _TWO_PI, self.theta)
            head = np.stack([np.cos(self.theta), np.sin(self.theta)], axis=1)
            self.pos = self.pos + (v_cmd * sc.dt)[:, None] * head
            self.pos[:, 0] = np.clip(self.pos[:, 0], self.env.x_min, self.env.x_max)
            self.pos[:, 1] = np.clip(self.pos[:, 1], self.env.y_min, self.env.y_max)

            # Mark coverage at the newly reached believed position.
            self.believed = np.clip(
                self.pos + noise,
                [self.env.x_min, self.env.y_min],
                [self.env.x_max, self.env.y_max])
            bx, by = self._cells_of(self.believed)
            for i in np.nonzero(self.active)[0]:
                self._mark_traversed(i, int(bx[i]), int(by[i]), step, trace)

            collisions += self._check_collisions()

            # Metric sampling: 15 samples at the metric interval from first
            # motion.
            if t0_step is None and np.any(v_cmd > 0):
                t0_step = step
                sample_steps = {t0_step + m * self.metric_steps
                                for m in range(sc.metrics.n_samples)}
            if step in sample_steps:
                act = self.active
                if act.any():
                    pts = self.pos[act]
                    centroid = pts.mean(axis=0)
                    g_samples.append(float(np.hypot(*(pts - centroid).T).mean()))
                    vels = (v_cmd[act])[:, None] * head[act]
                    vbar = vels.mean(axis=0)
                    o_samples.append(float(np.hypot(*(vels - vbar).T).mean()))

            tracing_step = trace is not None
            if tracing_step or step % sc.map_snapshot_every == 0:
                cp_now = self._union_cp()
                if step % sc.map_snapshot_every == 0:
                    cp_series.append((self.t, cp_now))

            if trace is not None:
                for i in range(self.n):
                    rec = {"type": "state", "step": step, "t": round(self.t, 9),
                           "id": i, "x": float(self.pos[i, 0]),
                           "y": float(self.pos[i, 1]),
                           "theta": float(self.theta[i]),
                           "V": float(v_cmd[i]), "omega": float(omega[i]),
                           "active": bool(self.active[i]),
                           "frontier": ([float(self.target[i, 0]),
                                         float(self.target[i, 1])]
                                        if self.has_target[i] else None),
                           "cp": cp_now}
                    trace.append(json.dumps(rec, sort_keys=True))
                if step % sc.map_snapshot_every == 0:
                    for i in range(self.n):
                        trace.append(json.dumps(
                            {"type": "map", "step": step, "id": i,
                             "rle": rle_encode(self.maps[i])}, sort_keys=True))

            # Failure schedule: toggle `count` uniformly chosen robots.
            if self.period_steps and step > 0 and step % self.period_steps == 0:
                picks = self.rng.choice(self.n, size=min(self.sc.failures.count, self.n),
                                        replace=False)
                for i in picks:
                    self.active[i] = not self.active[i]

            # Termination: any active robot whose own map shows no frontier.
            if step % self.frontier_steps == 0 and np.any(
                    self.frontier_empty & self.frontier_checked & self.active):
                terminated = True
                completer = int(np.nonzero(self.frontier_empty & self.frontier_checked
                                           & self.active)[0][0])
                tt = self.t
                break

        if not terminated:
            timed_out = True
            tt = sc.time_budget

        cp = self._union_cp()
        cp_series.append((tt, cp))
        n_requested = sc.metrics.n_samples
        group = float(np.mean(g_samples)) if g_samples else 0.0
        order = float(np.mean(o_samples)) if o_samples else 0.0
        return RunResult(
            scenario=sc.name, strategy=sc.strategy, seed=sc.seed,
            cp=cp, tt=tt, group=group, order=order, timed_out=timed_out,
            collisions=collisions, corrections=self.corrections,
            metric_samples=min(len(g_samples), n_requested),
            completer=completer, cp_series=cp_series,
            wall_s=_time.perf_counter() - wall_start)


def _chebyshev_cell_distance(occ: np.ndarray) -> np.ndarray:
    """Chebyshev distance (in cells) to the nearest obstacle cell."""
    from scipy import ndimage
    if not occ.any():
        return np.full(occ.shape, np.inf)
    return ndimage.distance_transform_cdt(occ == 0, metric="chessboard").astype(float)


def run(scenario: Scenario, trace: list | None = None) -> RunResult:
    """Build and run one simulation; returns its metric record."""
    return Simulation(scenario).run(trace=trace)
