"""Frontier detection, region growth and utility-based region selection.

A frontier cell is an unexplored cell 4-adjacent to a covered cell that the
robot can reach through covered cells from its own position.  Regions are
the maximal 8-connected unexplored components grown from frontier cells.
A region is chosen by minimizing ``psi_dist * D - psi_size * S`` where D is
the Euclidean distance (meters) from the robot to the nearest region cell
center and S is the region's cell count, so nearby large regions win.

Region analysis is a pure function of the map contents, so results are
memoized on the map bytes: robots whose maps have synchronized share one
labeling pass per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .coverage import COVERED, OBSTACLE, UNEXPLORED, CoverageMap
from .environment import Environment, cell_center


@dataclass(frozen=True)
class FrontierRegion:
    """One 8-connected unexplored component adjacent to reachable space."""

    cells: frozenset[tuple[int, int]]
    size: int
    centroid: tuple[float, float]
    anchor: tuple[int, int]  # lexicographically smallest frontier cell

    # Arrays kept for fast distance queries (same cells as ``cells``).
    cells_x: np.ndarray = None
    cells_y: np.ndarray = None


@dataclass(frozen=True)
class FrontierSet:
    regions: tuple[FrontierRegion, ...]

    def __len__(self) -> int:
        return len(self.regions)

    @property
    def empty(self) -> bool:
        return not self.regions


class MapAnalysis:
    """Labelings shared by every query against one map state."""

    __slots__ = ("covered_labels", "region_labels", "n_regions",
                 "region_cells", "per_component")

    def __init__(self, cells: np.ndarray):
        self.covered_labels, _ = kernels.label4(cells == COVERED)
        self.region_labels, self.n_regions = kernels.label8(cells == UNEXPLORED)
        # Cell coordinates per raw region id (1-based).
        self.region_cells: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        if self.n_regions:
            xs, ys = np.nonzero(self.region_labels)
            ids = self.region_labels[xs, ys]
            order = np.argsort(ids, kind="stable")
            xs, ys, ids = xs[order], ys[order], ids[order]
            bounds = np.searchsorted(ids, np.arange(1, self.n_regions + 2))
            for rid in range(1, self.n_regions + 1):
                lo, hi = bounds[rid - 1], bounds[rid]
                self.region_cells[rid] = (xs[lo:hi], ys[lo:hi])
        self.per_component: dict[int, tuple] = {}


class FrontierCache:
    """Two-generation memo keyed on map bytes.

    Maps mutate in place; merged content recurs across robots and steps, so
    keys from the previous step stay warm for one extra generation.
    """

    def __init__(self):
        self._current: dict[bytes, MapAnalysis] = {}
        self._previous: dict[bytes, MapAnalysis] = {}

    def rotate(self):
        self._previous = self._current
        self._current = {}

    def analysis(self, cells: np.ndarray) -> MapAnalysis:
        key = cells.tobytes()
        found = self._current.get(key)
        if found is None:
            found = self._previous.get(key)
            if found is None:
                found = MapAnalysis(cells)
            self._current[key] = found
        return found


def _regions_for_component(env: Environment, analysis: MapAnalysis,
                           comp_id: int) -> tuple[FrontierRegion, ...]:
    cached = analysis.per_component.get(comp_id)
    if cached is not None:
        return cached

    comp_mask = analysis.covered_labels == comp_id
    adjacent = kernels.dilate4(comp_mask) & (analysis.region_labels > 0)
    regions: list[FrontierRegion] = []
    if adjacent.any():
        fx, fy = np.nonzero(adjacent)
        fids = analysis.region_labels[fx, fy]
        for rid in np.unique(fids):
            sel = fids == rid
            rfx, rfy = fx[sel], fy[sel]
            # Anchor: lexicographically smallest (X, Y) frontier cell.
            a = np.lexsort((rfy, rfx))[0]
            anchor = (int(rfx[a]), int(rfy[a]))
            xs, ys = analysis.region_cells[int(rid)]
            cx = env.x_min + (xs + 0.5) * env.epsilon
            cy = env.y_min + (ys + 0.5) * env.epsilon
            regions.append(FrontierRegion(
                cells=frozenset(zip(xs.tolist(), ys.tolist())),
                size=int(xs.size),
                centroid=(float(cx.mean()), float(cy.mean())),
                anchor=anchor,
                cells_x=xs,
                cells_y=ys,
            ))
    regions.sort(key=lambda r: r.anchor)
    result = tuple(regions)
    analysis.per_component[comp_id] = result
    return result


def find_frontier_regions(m: CoverageMap, start: tuple[int, int],
                          env: Environment,
                          cache: FrontierCache | None = None) -> FrontierSet:
    """All frontier regions reachable from ``start`` through covered cells.

    Returns the empty set when the start cell is not covered (the robot has
    no foothold in its own map).
    """
    sx, sy = start
    if m.cells[sx, sy] != COVERED:
        return FrontierSet(())
    analysis = cache.analysis(m.cells) if cache is not None else MapAnalysis(m.cells)
    comp_id = int(analysis.covered_labels[sx, sy])
    return FrontierSet(_regions_for_component(env, analysis, comp_id))


def grow_region(m: CoverageMap, seed: tuple[int, int], env: Environment) -> FrontierRegion:
    """Maximal 8-connected unexplored component containing ``seed``."""
    sx, sy = seed
    if m.cells[sx, sy] != UNEXPLORED:
        raise ValueError(f"seed {seed} is not an unexplored cell")
    labels, _ = kernels.label8(m.cells == UNEXPLORED)
    rid = labels[sx, sy]
    xs, ys = np.nonzero(labels == rid)
    a = np.lexsort((ys, xs))[0]
    cx = env.x_min + (xs + 0.5) * env.epsilon
    cy = env.y_min + (ys + 0.5) * env.epsilon
    return FrontierRegion(
        cells=frozenset(zip(xs.tolist(), ys.tolist())),
        size=int(xs.size),
        centroid=(float(cx.mean()), float(cy.mean())),
        anchor=(int(xs[a]), int(ys[a])),
        cells_x=xs,
        cells_y=ys,
    )


def region_distance(region: FrontierRegion, p, env: Environment) -> float:
    """Euclidean distance (m) from ``p`` to the nearest region cell center."""
    cx = env.x_min + (region.cells_x + 0.5) * env.epsilon
    cy = env.y_min + (region.cells_y + 0.5) * env.epsilon
    d2 = (cx - p[0]) ** 2 + (cy - p[1]) ** 2
    return float(math.sqrt(d2.min()))


def select_frontier(fs: FrontierSet, robot_p, params, env: Environment) -> FrontierRegion | None:
    """Region minimizing ``psi_dist * D - psi_size * S``; anchor order breaks
    ties; None when the set is empty."""
    if fs.empty:
        return None
    best = None
    best_f = math.inf
    for region in fs.regions:  # regions pre-sorted by anchor
        f = params.psi_dist * region_distance(region, robot_p, env) \
            - params.psi_size * region.size
        if f < best_f:
            best = region
            best_f = f
    return best


def frontier_velocity(chosen: FrontierRegion | None, robot_p, v_separation) -> np.ndarray:
    """Attraction toward the chosen region's centroid.

    Separation overrides the attraction entirely: two robots racing for the
    same cell must break off rather than collide, so any nonzero separation
    vector zeroes this term.
    """
    if chosen is None:
        return np.zeros(2)
    if v_separation is not None and (v_separation[0] != 0.0 or v_separation[1] != 0.0):
        return np.zeros(2)
    return np.array([chosen.centroid[0] - robot_p[0],
                     chosen.centroid[1] - robot_p[1]])
