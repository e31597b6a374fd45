"""Scenario JSON parsing, validation and canonical emission.

Field names carry units (``epsilon_m``, ``dt_s``).  Obstacles can be given
as rectangles in meters (``obstacle_rects_m``, rasterized so that any
partially overlapped cell becomes an obstacle cell) or directly as cell
indices (``obstacle_cells``); emission always writes the cell form, which
round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict

from .boids import PARAM_KINDS
from .environment import Environment, ScenarioError, rasterize_rect
from .simulation import (CommConfig, FailureConfig, MetricConfig, NoiseConfig,
                         RobotSpec, Scenario, SensorConfig)

_PARAM_FIELDS = {
    "w_align", "w_cohesion", "w_separation", "w_wall", "w_frontier",
    "w_avoid", "psi_dist", "psi_size", "r_align", "r_separation",
    "r_cohesion", "r_avoid", "v_max", "omega_max", "gain_k",
}


def _require(doc: dict, key: str, kind, where: str = "scenario"):
    if key not in doc:
        raise ScenarioError(f"{where}: missing required field {key!r}")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ScenarioError(f"{where}.{key}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise ScenarioError(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def _optional(doc: dict, key: str, kind, default, where: str = "scenario"):
    if key not in doc or doc[key] is None:
        return default
    return _require(doc, key, kind, where)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document; raises ScenarioError with the
    offending field named."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")

    bounds = _require(doc, "bounds_m", dict)
    epsilon = _require(doc, "epsilon_m", float)
    if epsilon <= 0:
        raise ScenarioError("epsilon_m must be positive")
    for key in ("x_min", "x_max", "y_min", "y_max"):
        _require(bounds, key, float, "bounds_m")

    env_no_obs = Environment(
        x_min=float(bounds["x_min"]), x_max=float(bounds["x_max"]),
        y_min=float(bounds["y_min"]), y_max=float(bounds["y_max"]),
        epsilon=epsilon)

    cells: set[tuple[int, int]] = set()
    for idx, rect in enumerate(_optional(doc, "obstacle_rects_m", list, [])):
        where = f"obstacle_rects_m[{idx}]"
        for key in ("x_min", "x_max", "y_min", "y_max"):
            _require(rect, key, float, where)
        cells |= rasterize_rect(env_no_obs, rect["x_min"], rect["x_max"],
                                rect["y_min"], rect["y_max"])
    for idx, cell in enumerate(_optional(doc, "obstacle_cells", list, [])):
        if (not isinstance(cell, (list, tuple)) or len(cell) != 2
                or not all(isinstance(v, int) for v in cell)):
            raise ScenarioError(f"obstacle_cells[{idx}]: expected [X, Y] integers")
        cells.add((cell[0], cell[1]))

    env = Environment(
        x_min=env_no_obs.x_min, x_max=env_no_obs.x_max,
        y_min=env_no_obs.y_min, y_max=env_no_obs.y_max,
        epsilon=epsilon, obstacles=frozenset(cells))

    robots = []
    robot_docs = _require(doc, "robots", list)
    if not robot_docs:
        raise ScenarioError("robots: must list at least one robot")
    for idx, r in enumerate(robot_docs):
        where = f"robots[{idx}]"
        kind = _require(r, "kind", str, where)
        if kind not in PARAM_KINDS:
            raise ScenarioError(f"{where}.kind: unknown kind {kind!r}; "
                                f"expected one of {sorted(PARAM_KINDS)}")
        robots.append(RobotSpec(
            kind=kind,
            x=_require(r, "x_m", float, where),
            y=_require(r, "y_m", float, where),
            theta=_optional(r, "theta_rad", float, 0.0, where)))

    noise_doc = _optional(doc, "noise", dict, {})
    noise = NoiseConfig(
        lidar_std_m=_optional(noise_doc, "lidar_std_m", float, 0.0, "noise"),
        position_std_m=_optional(noise_doc, "position_std_m", float, 0.0, "noise"))

    failures = None
    if doc.get("failures") is not None:
        f = doc["failures"]
        failures = FailureConfig(
            period_s=_optional(f, "period_s", float, 30.0, "failures"),
            count=int(_optional(f, "count", int, 2, "failures")))
        if failures.period_s <= 0:
            raise ScenarioError("failures.period_s must be positive")
        if failures.count < 1:
            raise ScenarioError("failures.count must be at least 1")

    comm_doc = _optional(doc, "comm", dict, {})
    comm = CommConfig(
        radius_m=_optional(comm_doc, "radius_m", float, 1.5, "comm"),
        exchange_interval_s=_optional(comm_doc, "exchange_interval_s", float, 0.02, "comm"),
        liveness_timeout_s=_optional(comm_doc, "liveness_timeout_s", float, 3.0, "comm"))

    sensor_doc = _optional(doc, "sensor", dict, {})
    sensor = SensorConfig(
        n_rays=int(_optional(sensor_doc, "n_rays", int, 72, "sensor")),
        max_range_m=_optional(sensor_doc, "max_range_m", float, 3.5, "sensor"),
        body_radius_m=_optional(sensor_doc, "body_radius_m", float, 0.15, "sensor"),
        mark_range_m=_optional(sensor_doc, "mark_range_m", float, 3.5, "sensor"))

    metrics_doc = _optional(doc, "metrics", dict, {})
    metrics = MetricConfig(
        interval_s=_optional(metrics_doc, "interval_s", float, 1.0, "metrics"),
        n_samples=int(_optional(metrics_doc, "n_samples", int, 15, "metrics")))

    overrides = []
    for kind, fields in _optional(doc, "param_overrides", dict, {}).items():
        if kind not in PARAM_KINDS:
            raise ScenarioError(f"param_overrides: unknown kind {kind!r}")
        if not isinstance(fields, dict):
            raise ScenarioError(f"param_overrides.{kind}: expected an object")
        pairs = []
        for fname, fval in sorted(fields.items()):
            if fname not in _PARAM_FIELDS:
                raise ScenarioError(f"param_overrides.{kind}.{fname}: unknown parameter")
            pairs.append((fname, float(fval)))
        overrides.append((kind, tuple(pairs)))

    dt = _optional(doc, "dt_s", float, 0.02)
    return Scenario(
        name=_optional(doc, "name", str, "scenario"),
        env=env,
        robots=tuple(robots),
        strategy=_require(doc, "strategy", str),
        dt=dt,
        time_budget=_optional(doc, "time_budget_s", float, 600.0),
        seed=int(_optional(doc, "seed", int, 0)),
        noise=noise,
        failures=failures,
        comm=comm,
        sensor=sensor,
        metrics=metrics,
        frontier_period_s=_optional(doc, "frontier_period_s", float, dt),
        swarm_jitter_rad=_optional(doc, "swarm_jitter_rad", float, 0.05),
        map_snapshot_every=int(_optional(doc, "map_snapshot_every", int, 50)),
        param_overrides=tuple(sorted(overrides)),
    )


def emit_scenario(sc: Scenario) -> str:
    """Canonical JSON for a scenario; ``parse_scenario`` round-trips it."""
    doc = {
        "name": sc.name,
        "bounds_m": {"x_min": sc.env.x_min, "x_max": sc.env.x_max,
                     "y_min": sc.env.y_min, "y_max": sc.env.y_max},
        "epsilon_m": sc.env.epsilon,
        "obstacle_cells": [list(c) for c in sorted(sc.env.obstacles)],
        "strategy": sc.strategy,
        "robots": [{"kind": r.kind, "x_m": r.x, "y_m": r.y, "theta_rad": r.theta}
                   for r in sc.robots],
        "dt_s": sc.dt,
        "time_budget_s": sc.time_budget,
        "seed": sc.seed,
        "noise": asdict(sc.noise),
        "failures": asdict(sc.failures) if sc.failures else None,
        "comm": asdict(sc.comm),
        "sensor": asdict(sc.sensor),
        "metrics": asdict(sc.metrics),
        "frontier_period_s": sc.frontier_period_s,
        "swarm_jitter_rad": sc.swarm_jitter_rad,
        "map_snapshot_every": sc.map_snapshot_every,
        "param_overrides": {kind: dict(pairs) for kind, pairs in sc.param_overrides},
    }
    return json.dumps(doc, indent=2, sort_keys=True)
