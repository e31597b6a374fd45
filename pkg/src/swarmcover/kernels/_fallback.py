"""Pure numpy/scipy implementations of the hot kernels.

Selected at import time when the compiled extension is unavailable.  The
formulas mirror ``_native.pyx`` operation-for-operation so both paths give
matching results (float results agree to rounding of the trig library).

All grids are C-contiguous arrays indexed ``[X, Y]``.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

IMPL = "fallback"

_STRUCT4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT8 = np.ones((3, 3), dtype=bool)


def label4(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """4-connected component labels (0 = background, 1..n components)."""
    labels, n = ndimage.label(mask, structure=_STRUCT4)
    return labels.astype(np.int32), int(n)


def label8(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected component labels."""
    labels, n = ndimage.label(mask, structure=_STRUCT8)
    return labels.astype(np.int32), int(n)


def dilate4(mask: np.ndarray) -> np.ndarray:
    """Binary dilation by the 4-neighborhood cross."""
    out = mask.copy()
    out[1:, :] |= mask[:-1, :]
    out[:-1, :] |= mask[1:, :]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


def greedy_nearest(grid: np.ndarray, cx: int, cy: int) -> tuple[int, int]:
    """Unexplored cell closest to (cx, cy) in Euclidean cell distance.

    Ties break lexicographically on (X, Y).  Returns (-1, -1) when the map
    has no unexplored cells.
    """
    unexplored = np.argwhere(grid == 0)
    if unexplored.size == 0:
        return (-1, -1)
    xs = unexplored[:, 0].astype(np.int64)
    ys = unexplored[:, 1].astype(np.int64)
    d2 = (xs - cx) ** 2 + (ys - cy) ** 2
    best = np.lexsort((ys, xs, d2))[0]
    return int(xs[best]), int(ys[best])


def lidar_scan(occ: np.ndarray, x_min: float, y_min: float, eps: float,
               px: np.ndarray, py: np.ndarray, theta: np.ndarray,
               n_rays: int, max_range: float, body_radius: float
               ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Cast ``n_rays`` evenly spaced rays per robot against obstacle cells
    and the other robots' disc bodies.

    Returns ``(ranges, kinds, hit_cx, hit_cy)`` with shape [N, n_rays];
    kind 0 = no return (range = max_range), 1 = obstacle cell hit
    (hit_cx/hit_cy hold the cell), 2 = robot body hit.
    """
    n = len(px)
    dim_x, dim_y = occ.shape
    step = 2.0 * np.pi / n_rays
    bear = theta[:, None] + step * np.arange(n_rays)[None, :]
    dx = np.cos(bear)
    dy = np.sin(bear)
    ox = px[:, None]
    oy = py[:, None]

    n_cross = int(np.ceil(max_range / eps)) + 1
    m = np.arange(n_cross)

    with np.errstate(divide="ignore", invalid="ignore"):
        # Vertical gridline crossings: lines x = x_min + ix*eps.
        base_ix = np.floor((ox - x_min) / eps)
        pos_x = dx > 0
        ix = np.where(pos_x[..., None], base_ix[..., None] + (m + 1),
                      base_ix[..., None] - m)
        gx = x_min + ix * eps
        tv = (gx - ox[..., None]) / dx[..., None]
        cell_vx = np.where(pos_x[..., None], ix, ix - 1)
        cell_vy = np.floor((oy[..., None] + tv * dy[..., None] - y_min) / eps)

        # Horizontal gridline crossings: lines y = y_min + iy*eps.
        base_iy = np.floor((oy - y_min) / eps)
        pos_y = dy > 0
        iy = np.where(pos_y[..., None], base_iy[..., None] + (m + 1),
                      base_iy[..., None] - m)
        gy = y_min + iy * eps
        th = (gy - oy[..., None]) / dy[..., None]
        cell_hy = np.where(pos_y[..., None], iy, iy - 1)
        cell_hx = np.floor((ox[..., None] + th * dx[..., None] - x_min) / eps)

    # Vertical events stacked before horizontal so exact t-ties resolve the
    # same way as the native kernel (vertical first).
    t_all = np.concatenate([tv, th], axis=2)
    cx_all = np.concatenate([cell_vx, cell_hx], axis=2)
    cy_all = np.concatenate([cell_vy, cell_hy], axis=2)

    in_grid = (cx_all >= 0) & (cx_all < dim_x) & (cy_all >= 0) & (cy_all < dim_y)
    cxi = np.where(in_grid, cx_all, 0).astype(np.int64)
    cyi = np.where(in_grid, cy_all, 0).astype(np.int64)
    occupied = in_grid & (occ[cxi, cyi] != 0)
    valid = occupied & (t_all > 0.0) & (t_all <= max_range)

    t_masked = np.where(valid, t_all, np.inf)
    first = np.argmin(t_masked, axis=2)
    ii, jj = np.ogrid[:n, :n_rays]
    grid_t = t_masked[ii, jj, first]
    grid_cx = cxi[ii, jj, first]
    grid_cy = cyi[ii, jj, first]

    # Robot bodies: smallest positive ray-disc intersection over the others.
    body_t = np.full((n, n_rays), np.inf)
    if n > 1 and body_radius > 0.0:
        rel_x = px[None, :] - ox  # [N, M]
        rel_y = py[None, :] - oy
        b = rel_x[:, :, None] * dx[:, None, :] + rel_y[:, :, None] * dy[:, None, :]
        c = (rel_x ** 2 + rel_y ** 2 - body_radius ** 2)[:, :, None]
        disc = b * b - c
        with np.errstate(invalid="ignore"):
            t_body = b - np.sqrt(disc)
        ok = (disc >= 0.0) & (t_body > 0.0) & (t_body <= max_range)
        ok[np.arange(n), np.arange(n), :] = False
        t_body = np.where(ok, t_body, np.inf)
        body_t = t_body.min(axis=1)

    ranges = np.full((n, n_rays), max_range)
    kinds = np.zeros((n, n_rays), dtype=np.uint8)
    hit_cx = np.full((n, n_rays), -1, dtype=np.int32)
    hit_cy = np.full((n, n_rays), -1, dtype=np.int32)

    grid_wins = (grid_t <= body_t) & np.isfinite(grid_t)
    body_wins = (body_t < grid_t) & np.isfinite(body_t)
    ranges[grid_wins] = grid_t[grid_wins]
    kinds[grid_wins] = 1
    hit_cx[grid_wins] = grid_cx[grid_wins]
    hit_cy[grid_wins] = grid_cy[grid_wins]
    ranges[body_wins] = body_t[body_wins]
    kinds[body_wins] = 2
    return ranges, kinds, hit_cx, hit_cy
