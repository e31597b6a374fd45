"""Evaluation metrics: coverage percentage, turnaround time support, group
and order formation statistics, and aggregation over repeated runs.

The group metric averages, over a sampling window, the mean robot distance
to the per-sample centroid; the order metric does the same for velocities
about the per-sample mean velocity.  Both depend only on relative positions
(velocities): translating every robot by the same offset leaves them
unchanged, and scaling all inputs by s scales the metric by s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coverage import CoverageMap, coverage_fraction


def coverage_percentage(union_map: CoverageMap, free_mask: np.ndarray | None = None) -> float:
    """Percentage of the cells-to-cover accounted for in the union map."""
    return coverage_fraction(union_map, free_mask) * 100.0


def group_metric(position_samples: list[np.ndarray]) -> float:
    """Mean, over samples, of the mean robot distance to the sample centroid.

    Each sample is an array [K, 2] of the positions of the robots active at
    that instant.  Samples with no robots are skipped.
    """
    per_sample = []
    for pts in position_samples:
        pts = np.asarray(pts, dtype=float)
        if pts.size == 0:
            continue
        centroid = pts.mean(axis=0)
        per_sample.append(np.hypot(*(pts - centroid).T).mean())
    if not per_sample:
        return 0.0
    return float(np.mean(per_sample))


def order_metric(velocity_samples: list[np.ndarray]) -> float:
    """Mean, over samples, of the mean velocity deviation from the sample
    mean velocity."""
    per_sample = []
    for vels in velocity_samples:
        vels = np.asarray(vels, dtype=float)
        if vels.size == 0:
            continue
        vbar = vels.mean(axis=0)
        per_sample.append(np.hypot(*(vels - vbar).T).mean())
    if not per_sample:
        return 0.0
    return float(np.mean(per_sample))


@dataclass(frozen=True)
class AggregateResult:
    """Per-metric mean and sample standard deviation over a run batch."""

    scenario: str
    strategy: str
    n_runs: int
    cp_mean: float
    cp_std: float
    tt_mean: float
    tt_std: float
    group_mean: float
    group_std: float
    order_mean: float
    order_std: float
    std_flagged: bool  # true when n_runs < 2 and the stds default to 0


def _mean_std(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size >= 2 else 0.0
    return mean, std


def aggregate(results: list) -> AggregateResult:
    """Sample mean and standard deviation (n-1 denominator) per metric."""
    if not results:
        raise ValueError("aggregate requires at least one run")
    cp_m, cp_s = _mean_std([r.cp for r in results])
    tt_m, tt_s = _mean_std([r.tt for r in results])
    g_m, g_s = _mean_std([r.group for r in results])
    o_m, o_s = _mean_std([r.order for r in results])
    return AggregateResult(
        scenario=results[0].scenario, strategy=results[0].strategy,
        n_runs=len(results),
        cp_mean=cp_m, cp_std=cp_s, tt_mean=tt_m, tt_std=tt_s,
        group_mean=g_m, group_std=g_s, order_mean=o_m, order_std=o_s,
        std_flagged=len(results) < 2)
