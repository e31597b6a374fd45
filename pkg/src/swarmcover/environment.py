"""Ground-truth rectangular world and grid/world coordinate conversion.

The world is a rectangle [x_min, x_max] x [y_min, y_max] discretized into
square cells of side ``epsilon``.  Obstacles are stored as a set of cell
indices (rasterized from rectangles at scenario load); robots only learn
about them through sensing.

Cell indexing convention: a cell index is an (X, Y) pair with
0 <= X < dim_x, 0 <= Y < dim_y.  Dense arrays over the grid are indexed
``a[X, Y]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Guard against float noise like (4.8 - 0.0) / 0.3 == 15.999999999999998
# flooring one cell short of the intended grid.
_DIM_EPS = 1e-9

CellIndex = tuple[int, int]


class ScenarioError(ValueError):
    """Raised when a scenario or environment violates an invariant."""


@dataclass(frozen=True)
class Environment:
    """Immutable world description, safely shareable among all agents."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    epsilon: float
    obstacles: frozenset[CellIndex] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ScenarioError(f"x_max must exceed x_min (got {self.x_min}..{self.x_max})")
        if not self.y_max > self.y_min:
            raise ScenarioError(f"y_max must exceed y_min (got {self.y_min}..{self.y_max})")
        if not self.epsilon > 0:
            raise ScenarioError("epsilon must be positive")
        dim_x, dim_y = grid_dims(self)
        if dim_x < 1 or dim_y < 1:
            raise ScenarioError(
                f"degenerate grid: bounds {self.x_max - self.x_min} x "
                f"{self.y_max - self.y_min} at epsilon {self.epsilon} floor to "
                f"({dim_x}, {dim_y})"
            )
        for (cx, cy) in self.obstacles:
            if not (0 <= cx < dim_x and 0 <= cy < dim_y):
                raise ScenarioError(f"obstacle cell ({cx}, {cy}) outside grid ({dim_x}, {dim_y})")
        object.__setattr__(self, "obstacles", frozenset(self.obstacles))

    @property
    def dims(self) -> tuple[int, int]:
        return grid_dims(self)

    def obstacle_mask(self) -> np.ndarray:
        """Dense boolean mask of ground-truth obstacle cells, indexed [X, Y]."""
        dim_x, dim_y = self.dims
        mask = np.zeros((dim_x, dim_y), dtype=bool)
        for (cx, cy) in self.obstacles:
            mask[cx, cy] = True
        return mask

    def n_free_cells(self) -> int:
        dim_x, dim_y = self.dims
        return dim_x * dim_y - len(self.obstacles)


def grid_dims(env: Environment) -> tuple[int, int]:
    """Grid dimensions: floor of the bound spans divided by the resolution."""
    dim_x = int(math.floor((env.x_max - env.x_min) / env.epsilon + _DIM_EPS))
    dim_y = int(math.floor((env.y_max - env.y_min) / env.epsilon + _DIM_EPS))
    return dim_x, dim_y


def world_to_cell(env: Environment, p) -> CellIndex:
    """Cell containing a world position.

    Positions exactly on the upper bounds map to the last cell, so a robot
    clamped to the boundary stays inside the grid.  Raises for positions
    outside the bounds; callers clamp first.
    """
    px, py = float(p[0]), float(p[1])
    if not (env.x_min <= px <= env.x_max and env.y_min <= py <= env.y_max):
        raise ValueError(f"position ({px}, {py}) outside bounds")
    dim_x, dim_y = grid_dims(env)
    cx = min(int(math.floor((px - env.x_min) / env.epsilon)), dim_x - 1)
    cy = min(int(math.floor((py - env.y_min) / env.epsilon)), dim_y - 1)
    return cx, cy


def cell_center(env: Environment, c: CellIndex) -> tuple[float, float]:
    """World position of a cell's center."""
    cx, cy = c
    dim_x, dim_y = grid_dims(env)
    if not (0 <= cx < dim_x and 0 <= cy < dim_y):
        raise ValueError(f"cell ({cx}, {cy}) outside grid ({dim_x}, {dim_y})")
    return (env.x_min + (cx + 0.5) * env.epsilon,
            env.y_min + (cy + 0.5) * env.epsilon)


def clamp_to_bounds(env: Environment, px: float, py: float) -> tuple[float, float]:
    """Clamp a position onto the closed rectangle of the world bounds."""
    return (min(max(px, env.x_min), env.x_max),
            min(max(py, env.y_min), env.y_max))


def rasterize_rect(env: Environment, x_min: float, x_max: float,
                   y_min: float, y_max: float) -> set[CellIndex]:
    """Cells overlapped by a rectangle (any partial overlap counts).

    Used to turn scenario obstacle rectangles into obstacle cell sets; a
    partially-overlapped boundary cell is classified as obstacle.
    """
    if not (x_max > x_min and y_max > y_min):
        raise ScenarioError(f"degenerate obstacle rectangle {x_min, x_max, y_min, y_max}")
    dim_x, dim_y = grid_dims(env)
    eps = env.epsilon
    # Interior-touching index ranges; a shared edge alone does not overlap.
    lo_x = int(math.floor((x_min - env.x_min) / eps + _DIM_EPS))
    hi_x = int(math.ceil((x_max - env.x_min) / eps - _DIM_EPS)) - 1
    lo_y = int(math.floor((y_min - env.y_min) / eps + _DIM_EPS))
    hi_y = int(math.ceil((y_max - env.y_min) / eps - _DIM_EPS)) - 1
    cells = set()
    for cx in range(max(lo_x, 0), min(hi_x, dim_x - 1) + 1):
        for cy in range(max(lo_y, 0), min(hi_y, dim_y - 1) + 1):
            cells.add((cx, cy))
    return cells
