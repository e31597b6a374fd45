"""Experiment presets: bundled environments, start layouts and run batches.

Each preset expands, given a base seed, into a fully determined list of
(variant name, scenario list) pairs; per-run scenarios differ by seed and by
a small seeded placement jitter that stands in for physical setup variation
(routing runs are exempt: the sweep plan assumes exact band starts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .environment import Environment, ScenarioError, cell_center, grid_dims, rasterize_rect
from .simulation import (CommConfig, FailureConfig, MetricConfig, NoiseConfig,
                         RobotSpec, Scenario, SensorConfig)
from .strategies import plan_sweep

SWARMING_STRATEGIES = ("frontier_swarm", "frontier_only", "greedy_swarm", "swarm_only")

# Start placement jitter: uniform half-widths for position (m) and heading (rad).
_JITTER_POS = 0.05
_JITTER_THETA = 0.2


def _env_small() -> Environment:
    return Environment(0.0, 3.6, 0.0, 3.6, 0.3)


def _obstacle_rects_large() -> list[tuple[float, float, float, float]]:
    # Four 0.6 m boxes, grid-aligned, clear of the start cluster.
    return [
        (0.9, 1.5, 2.0, 2.6),
        (2.6, 3.2, 1.6, 2.2),
        (1.6, 2.2, 3.4, 4.0),
        (3.4, 4.0, 3.0, 3.6),
    ]


def _env_large(with_obstacles: bool = True) -> Environment:
    base = Environment(0.0, 4.4, 0.0, 4.8, 0.3)
    if not with_obstacles:
        return base
    cells: set = set()
    for (x0, x1, y0, y1) in _obstacle_rects_large():
        cells |= rasterize_rect(base, x0, x1, y0, y1)
    return Environment(0.0, 4.4, 0.0, 4.8, 0.3, frozenset(cells))


def _env_noise() -> Environment:
    # One obstacle cell in the middle of the large arena.
    base = Environment(0.0, 4.4, 0.0, 4.8, 0.3)
    cells = rasterize_rect(base, 2.1, 2.4, 2.4, 2.7)
    return Environment(0.0, 4.4, 0.0, 4.8, 0.3, frozenset(cells))


# Urban block layout in unit-square fractions (x0, x1, y0, y1): a 4x3 grid of
# buildings separated by streets, rasterized per environment size.
_URBAN_BLOCKS = [
    (0.08 + 0.24 * bx, 0.22 + 0.24 * bx, 0.10 + 0.30 * by, 0.28 + 0.30 * by)
    for bx in range(4) for by in range(3)
]


def _env_urban(width: float, height: float, epsilon: float) -> Environment:
    base = Environment(0.0, width, 0.0, height, epsilon)
    cells: set = set()
    for (fx0, fx1, fy0, fy1) in _URBAN_BLOCKS:
        cells |= rasterize_rect(base, fx0 * width, fx1 * width,
                                fy0 * height, fy1 * height)
    return Environment(0.0, width, 0.0, height, epsilon, frozenset(cells))


def _cluster_layout(kinds: list[str], origin: tuple[float, float],
                    spacing: float = 0.45, per_row: int = 4) -> list[RobotSpec]:
    """Compact grid of starts inside the separation radius: the release
    transient is what differentiates the strategies' formation behavior."""
    specs = []
    for i, kind in enumerate(kinds):
        col, row = i % per_row, i // per_row
        specs.append(RobotSpec(kind=kind,
                               x=origin[0] + spacing * col,
                               y=origin[1] + spacing * row,
                               theta=0.0))
    return specs


def _uniform_layout(env: Environment, kinds: list[str]) -> list[RobotSpec]:
    """Starts evenly strided over the free cells of the environment."""
    dim_x, dim_y = grid_dims(env)
    free = [(x, y) for x in range(dim_x) for y in range(dim_y)
            if (x, y) not in env.obstacles]
    n = len(kinds)
    if n > len(free):
        raise ScenarioError(f"{n} robots do not fit in {len(free)} free cells")
    stride = len(free) / n
    specs = []
    for i, kind in enumerate(kinds):
        cx, cy = free[int(i * stride)]
        x, y = cell_center(env, (cx, cy))
        specs.append(RobotSpec(kind=kind, x=x, y=y, theta=0.0))
    return specs


def _routing_layout(env: Environment, kinds: list[str]) -> list[RobotSpec]:
    """Each robot starts on the first waypoint of its sweep band, heading
    along the first row."""
    plan = plan_sweep(env, len(kinds))
    specs = []
    for i, kind in enumerate(kinds):
        x, y = plan.waypoints[i][0]
        specs.append(RobotSpec(kind=kind, x=float(x), y=float(y), theta=0.0))
    return specs


def _jitter(specs: list[RobotSpec], env: Environment,
            seed_key: list[int]) -> tuple[RobotSpec, ...]:
    rng = np.random.default_rng(seed_key)
    out = []
    margin = 0.2
    for s in specs:
        dx, dy = rng.uniform(-_JITTER_POS, _JITTER_POS, size=2)
        dth = rng.uniform(-_JITTER_THETA, _JITTER_THETA)
        out.append(RobotSpec(
            kind=s.kind,
            x=float(np.clip(s.x + dx, env.x_min + margin, env.x_max - margin)),
            y=float(np.clip(s.y + dy, env.y_min + margin, env.y_max - margin)),
            theta=s.theta + dth))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    description: str
    runs: int
    build: Callable[[int], list[tuple[str, list[Scenario]]]]
    trace_by_default: bool = True


def _expand(name: str, env: Environment, layout: list[RobotSpec],
            strategy: str, base_seed: int, runs: int, *,
            variant: str | None = None, variant_index: int = 0,
            jitter: bool = True, **scenario_kwargs) -> tuple[str, list[Scenario]]:
    label = variant or strategy
    scenarios = []
    for run_idx in range(runs):
        robots = (_jitter(layout, env, [base_seed, variant_index, run_idx])
                  if jitter else tuple(layout))
        scenarios.append(Scenario(
            name=f"{name}/{label}",
            env=env,
            robots=robots,
            strategy=strategy,
            seed=base_seed + run_idx,
            **scenario_kwargs))
    return label, scenarios


def _exp1_small(base_seed: int, runs: int = 5) -> list[tuple[str, list[Scenario]]]:
    env = _env_small()
    layout = _cluster_layout(["burger"] * 8, origin=(0.6, 0.7))
    return [
        _expand("exp1_small", env, layout, strategy, base_seed, runs,
                variant_index=k, time_budget=600.0)
        for k, strategy in enumerate(SWARMING_STRATEGIES)
    ]


def _exp1_large(base_seed: int, runs: int = 5) -> list[tuple[str, list[Scenario]]]:
    env = _env_large()
    layout = _cluster_layout(["burger"] * 8, origin=(0.7, 0.5))
    return [
        _expand("exp1_large", env, layout, strategy, base_seed, runs,
                variant_index=k, time_budget=1200.0)
        for k, strategy in enumerate(SWARMING_STRATEGIES)
    ]


def _exp2_routing(base_seed: int, runs: int = 5) -> list[tuple[str, list[Scenario]]]:
    env = _env_large(with_obstacles=False)
    kinds = ["burger"] * 5 + ["p3dx"] * 2
    out = [_expand("exp2_routing", env, _routing_layout(env, kinds), "routing",
                   base_seed, runs, variant_index=0, jitter=False,
                   time_budget=1200.0)]
    cluster = _cluster_layout(kinds, origin=(0.7, 0.5))
    for k, strategy in enumerate(SWARMING_STRATEGIES, start=1):
        out.append(_expand("exp2_routing", env, cluster, strategy, base_seed,
                           runs, variant_index=k, time_budget=1200.0))
    return out


def _exp3_failure(base_seed: int, runs: int = 5) -> list[tuple[str, list[Scenario]]]:
    env = _env_large()
    kinds = ["burger"] * 6 + ["p3dx"] * 2
    layout = _cluster_layout(kinds, origin=(0.7, 0.5), spacing=1.0)
    return [
        _expand("exp3_failure", env, layout, "frontier_swarm", base_seed, runs,
                variant="failure", variant_index=0, time_budget=1800.0,
                failures=FailureConfig(period_s=30.0, count=2)),
        _expand("exp3_failure", env, layout, "frontier_swarm", base_seed, runs,
                variant="no_failure", variant_index=1, time_budget=1800.0),
    ]


def _exp4_noise(base_seed: int, runs: int = 5) -> list[tuple[str, list[Scenario]]]:
    env = _env_noise()
    kinds = ["burger"] * 6 + ["p3dx"] * 2
    layout = _cluster_layout(kinds, origin=(0.7, 0.5), spacing=1.0)
    return [
        _expand("exp4_noise", env, layout, "frontier_swarm", base_seed, runs,
                variant_index=0, time_budget=1200.0,
                noise=NoiseConfig(lidar_std_m=0.1, position_std_m=0.1)),
    ]


def _exp5_urban(base_seed: int, runs: int = 5) -> list[tuple[str, list[Scenario]]]:
    env = _env_urban(120.0, 90.0, 1.0)
    kinds = ["burger"] * 12 + ["p3dx"] * 4
    layout = _uniform_layout(env, kinds)
    return [
        _expand("exp5_urban", env, layout, strategy, base_seed, runs,
                variant_index=k, jitter=True, time_budget=3000.0,
                dt=0.05, frontier_period_s=0.25, map_snapshot_every=500)
        for k, strategy in enumerate(SWARMING_STRATEGIES)
    ]


EXP6_SIZES = (40.0, 80.0)
EXP6_COUNTS = (40, 50, 60, 70, 80)


def _exp6_scaling(base_seed: int, runs: int = 10) -> list[tuple[str, list[Scenario]]]:
    out = []
    k = 0
    for size in EXP6_SIZES:
        env = _env_urban(size, size, 1.0)
        budget = 1500.0 if size <= 40.0 else 3000.0
        for count in EXP6_COUNTS:
            kinds = ["burger"] * count
            layout = _uniform_layout(env, kinds)
            out.append(_expand(
                "exp6_scaling", env, layout, "frontier_swarm", base_seed, runs,
                variant=f"{int(size)}x{int(size)}_n{count}", variant_index=k,
                jitter=True, time_budget=budget, dt=0.05,
                frontier_period_s=0.25, map_snapshot_every=500))
            k += 1
    return out


PRESETS: dict[str, ExperimentPreset] = {
    "exp1_small": ExperimentPreset(
        "exp1_small", "four swarming strategies, empty 3.6x3.6 m arena, 8 robots",
        runs=5, build=_exp1_small),
    "exp1_large": ExperimentPreset(
        "exp1_large", "four swarming strategies, 4.4x4.8 m arena with four boxes",
        runs=5, build=_exp1_large),
    "exp2_routing": ExperimentPreset(
        "exp2_routing", "sweep routing vs swarming, obstacle-free 4.4x4.8 m arena",
        runs=5, build=_exp2_routing),
    "exp3_failure": ExperimentPreset(
        "exp3_failure", "robot failure toggling every 30 s vs fault-free baseline",
        runs=5, build=_exp3_failure),
    "exp4_noise": ExperimentPreset(
        "exp4_noise", "0.1 m lidar and position noise, single-obstacle arena",
        runs=5, build=_exp4_noise),
    "exp5_urban": ExperimentPreset(
        "exp5_urban", "16 robots in the 120x90 m urban map",
        runs=5, build=_exp5_urban, trace_by_default=False),
    "exp6_scaling": ExperimentPreset(
        "exp6_scaling", "robot count and map size sweep (Table-7 style)",
        runs=10, build=_exp6_scaling, trace_by_default=False),
}


def build_preset(name: str, base_seed: int,
                 runs: int | None = None) -> list[tuple[str, list[Scenario]]]:
    if name not in PRESETS:
        raise ScenarioError(f"unknown preset {name!r}; expected one of "
                            f"{sorted(PRESETS)}")
    preset = PRESETS[name]
    return preset.build(base_seed, runs if runs is not None else preset.runs)
