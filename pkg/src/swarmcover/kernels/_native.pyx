# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: connected-component labeling, grid ray casting and
nearest-unexplored-cell search.

The formulas match ``_fallback.py`` operation-for-operation; builds use
-ffp-contract=off so float results agree with the numpy path.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport asin, atan2, ceil, cos, floor, sin, sqrt

cnp.import_array()

IMPL = "native"

DEF KIND_MISS = 0
DEF KIND_OBSTACLE = 1
DEF KIND_BODY = 2


def _label(cnp.uint8_t[:, ::1] mask, bint eight_connected):
    cdef Py_ssize_t dim_x = mask.shape[0]
    cdef Py_ssize_t dim_y = mask.shape[1]
    labels_arr = np.zeros((dim_x, dim_y), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] labels = labels_arr
    stack_arr = np.empty(dim_x * dim_y, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t sx, sy, x, y, nx, ny, top, k
    cdef int current = 0
    cdef int n_dirs = 8 if eight_connected else 4
    cdef int[8] ddx
    cdef int[8] ddy
    ddx[0] = 1; ddy[0] = 0
    ddx[1] = -1; ddy[1] = 0
    ddx[2] = 0; ddy[2] = 1
    ddx[3] = 0; ddy[3] = -1
    ddx[4] = 1; ddy[4] = 1
    ddx[5] = 1; ddy[5] = -1
    ddx[6] = -1; ddy[6] = 1
    ddx[7] = -1; ddy[7] = -1

    for sx in range(dim_x):
        for sy in range(dim_y):
            if mask[sx, sy] == 0 or labels[sx, sy] != 0:
                continue
            current += 1
            labels[sx, sy] = current
            top = 0
            stack[top] = sx * dim_y + sy
            top += 1
            while top > 0:
                top -= 1
                x = stack[top] // dim_y
                y = stack[top] % dim_y
                for k in range(n_dirs):
                    nx = x + ddx[k]
                    ny = y + ddy[k]
                    if nx < 0 or nx >= dim_x or ny < 0 or ny >= dim_y:
                        continue
                    if mask[nx, ny] != 0 and labels[nx, ny] == 0:
                        labels[nx, ny] = current
                        stack[top] = nx * dim_y + ny
                        top += 1
    return labels_arr, current


def label4(mask):
    """4-connected component labels (0 = background, 1..n components)."""
    return _label(np.ascontiguousarray(mask, dtype=np.uint8), False)


def label8(mask):
    """8-connected component labels."""
    return _label(np.ascontiguousarray(mask, dtype=np.uint8), True)


def dilate4(mask):
    """Binary dilation by the 4-neighborhood cross."""
    m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] src = m
    cdef Py_ssize_t dim_x = src.shape[0]
    cdef Py_ssize_t dim_y = src.shape[1]
    out_arr = m.copy()
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t x, y
    for x in range(dim_x):
        for y in range(dim_y):
            if src[x, y]:
                if x > 0:
                    out[x - 1, y] = 1
                if x + 1 < dim_x:
                    out[x + 1, y] = 1
                if y > 0:
                    out[x, y - 1] = 1
                if y + 1 < dim_y:
                    out[x, y + 1] = 1
    return out_arr.astype(bool)


def greedy_nearest(grid, long long cx, long long cy):
    """Unexplored cell closest to (cx, cy); ties lexicographic on (X, Y)."""
    g = np.ascontiguousarray(grid, dtype=np.int8)
    cdef cnp.int8_t[:, ::1] cells = g
    cdef Py_ssize_t dim_x = cells.shape[0]
    cdef Py_ssize_t dim_y = cells.shape[1]
    cdef Py_ssize_t x, y
    cdef long long best_d2 = -1
    cdef Py_ssize_t best_x = -1, best_y = -1
    cdef long long ddx, ddy, d2
    for x in range(dim_x):
        for y in range(dim_y):
            if cells[x, y] != 0:
                continue
            ddx = x - cx
            ddy = y - cy
            d2 = ddx * ddx + ddy * ddy
            if best_d2 < 0 or d2 < best_d2:
                best_d2 = d2
                best_x = x
                best_y = y
    return int(best_x), int(best_y)


def lidar_scan(occ, double x_min, double y_min, double eps,
               px, py, theta, int n_rays, double max_range,
               double body_radius):
    """See ``_fallback.lidar_scan``; same contract and event ordering."""
    occ_c = np.ascontiguousarray(occ, dtype=np.uint8)
    px_c = np.ascontiguousarray(px, dtype=np.float64)
    py_c = np.ascontiguousarray(py, dtype=np.float64)
    th_c = np.ascontiguousarray(theta, dtype=np.float64)
    cdef cnp.uint8_t[:, ::1] grid = occ_c
    cdef double[::1] oxv = px_c
    cdef double[::1] oyv = py_c
    cdef double[::1] thv = th_c
    cdef Py_ssize_t n = oxv.shape[0]
    cdef Py_ssize_t dim_x = grid.shape[0]
    cdef Py_ssize_t dim_y = grid.shape[1]

    ranges_arr = np.full((n, n_rays), max_range, dtype=np.float64)
    kinds_arr = np.zeros((n, n_rays), dtype=np.uint8)
    hcx_arr = np.full((n, n_rays), -1, dtype=np.int32)
    hcy_arr = np.full((n, n_rays), -1, dtype=np.int32)
    cdef double[:, ::1] ranges = ranges_arr
    cdef cnp.uint8_t[:, ::1] kinds = kinds_arr
    cdef cnp.int32_t[:, ::1] hcx = hcx_arr
    cdef cnp.int32_t[:, ::1] hcy = hcy_arr

    cdef double step = 2.0 * 3.14159265358979323846264338327950288 / n_rays
    cdef int n_cross = <int>ceil(max_range / eps) + 1
    cdef double sentinel = max_range + 1.0

    dirs_x_arr = np.empty(n_rays, dtype=np.float64)
    dirs_y_arr = np.empty(n_rays, dtype=np.float64)
    body_tmp_arr = np.empty(n_rays, dtype=np.float64)
    cdef double[::1] dirs_x = dirs_x_arr
    cdef double[::1] dirs_y = dirs_y_arr
    cdef double[::1] body_tmp = body_tmp_arr

    cdef Py_ssize_t i, j, k
    cdef long long kk, kmod, k_center, kw
    cdef double ox, oy, bear, dx, dy
    cdef double base_ix, base_iy, ix, iy, gx, gy, t
    cdef double grid_t, body_t
    cdef long long cell_x, cell_y, grid_cx, grid_cy
    cdef int mv, mh
    cdef bint pos_x, pos_y, done
    cdef double tv, thh
    cdef double rel_x, rel_y, b, c, disc, tb, d, ang, half

    for i in range(n):
        ox = oxv[i]
        oy = oyv[i]
        for k in range(n_rays):
            bear = thv[i] + step * k
            dirs_x[k] = cos(bear)
            dirs_y[k] = sin(bear)
            body_tmp[k] = sentinel

        # Robot bodies: only rays within the angular window around each
        # other robot can intersect its disc; per-ray minimum over pairs.
        if body_radius > 0.0:
            for j in range(n):
                if j == i:
                    continue
                rel_x = oxv[j] - ox
                rel_y = oyv[j] - oy
                c = rel_x * rel_x + rel_y * rel_y - body_radius * body_radius
                if c <= 0.0:
                    continue
                d = sqrt(rel_x * rel_x + rel_y * rel_y)
                if d - body_radius > max_range:
                    continue
                ang = atan2(rel_y, rel_x)
                half = asin(body_radius / d)
                k_center = <long long>floor((ang - thv[i]) / step + 0.5)
                kw = <long long>ceil(half / step) + 1
                for kk in range(k_center - kw, k_center + kw + 1):
                    kmod = kk % n_rays
                    if kmod < 0:
                        kmod += n_rays
                    dx = dirs_x[kmod]
                    dy = dirs_y[kmod]
                    b = rel_x * dx + rel_y * dy
                    disc = b * b - c
                    if disc < 0.0:
                        continue
                    tb = b - sqrt(disc)
                    if tb > 0.0 and tb <= max_range and tb < body_tmp[kmod]:
                        body_tmp[kmod] = tb

        base_ix = floor((ox - x_min) / eps)
        base_iy = floor((oy - y_min) / eps)
        for k in range(n_rays):
            dx = dirs_x[k]
            dy = dirs_y[k]
            pos_x = dx > 0
            pos_y = dy > 0

            # First occupied grid crossing: walk vertical and horizontal
            # crossing events in t order (vertical first on exact ties).
            grid_t = sentinel
            grid_cx = -1
            grid_cy = -1
            ix = 0.0
            iy = 0.0
            mv = 0
            mh = 0
            done = False
            while not done:
                tv = sentinel
                thh = sentinel
                if mv < n_cross and dx != 0.0:
                    ix = base_ix + (mv + 1) if pos_x else base_ix - mv
                    gx = x_min + ix * eps
                    tv = (gx - ox) / dx
                if mh < n_cross and dy != 0.0:
                    iy = base_iy + (mh + 1) if pos_y else base_iy - mh
                    gy = y_min + iy * eps
                    thh = (gy - oy) / dy
                if tv > max_range and thh > max_range:
                    break
                if tv <= thh:
                    t = tv
                    cell_x = <long long>(ix if pos_x else ix - 1)
                    cell_y = <long long>floor((oy + t * dy - y_min) / eps)
                    mv += 1
                else:
                    t = thh
                    cell_y = <long long>(iy if pos_y else iy - 1)
                    cell_x = <long long>floor((ox + t * dx - x_min) / eps)
                    mh += 1
                if t <= 0.0:
                    continue
                if 0 <= cell_x < dim_x and 0 <= cell_y < dim_y:
                    if grid[cell_x, cell_y] != 0:
                        grid_t = t
                        grid_cx = cell_x
                        grid_cy = cell_y
                        done = True

            body_t = body_tmp[k]
            if grid_t <= body_t and grid_t <= max_range:
                ranges[i, k] = grid_t
                kinds[i, k] = KIND_OBSTACLE
                hcx[i, k] = <cnp.int32_t>grid_cx
                hcy[i, k] = <cnp.int32_t>grid_cy
            elif body_t < grid_t and body_t <= max_range:
                ranges[i, k] = body_t
                kinds[i, k] = KIND_BODY

    return ranges_arr, kinds_arr, hcx_arr, hcy_arr
