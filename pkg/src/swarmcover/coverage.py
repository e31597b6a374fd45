"""Per-robot coverage-obstacle (CO) matrix.

Cell states: 0 = unexplored, 1 = covered, 2 = obstacle.  Exchange between
robots is an element-wise max merge, which makes the map a join-semilattice:
merges are commutative, associative and idempotent, and cell values never
decrease through merging.

The one deliberate exception to monotonicity is noise correction: a robot
that physically traverses a cell it had marked as an obstacle downgrades it
to covered in its own replica (sensor noise produced the false mark, the
wheels are the better witness).  The merge itself stays a pure max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNEXPLORED = 0
COVERED = 1
OBSTACLE = 2


@dataclass
class CoverageMap:
    """Dense CO matrix owned by a single robot.

    ``version`` counts actual state changes; the simulator uses it to skip
    no-op exchanges.
    """

    owner: int
    cells: np.ndarray  # int8, indexed [X, Y]
    version: int = 0

    @property
    def dims(self) -> tuple[int, int]:
        return self.cells.shape

    def copy(self) -> "CoverageMap":
        return CoverageMap(self.owner, self.cells.copy(), self.version)


def init_map(dims: tuple[int, int], owner: int = 0) -> CoverageMap:
    """Fresh map with every cell unexplored."""
    dim_x, dim_y = dims
    if dim_x < 1 or dim_y < 1:
        raise ValueError(f"map dims must be >= (1, 1), got {dims}")
    return CoverageMap(owner, np.zeros((dim_x, dim_y), dtype=np.int8))


def mark_covered(m: CoverageMap, c, traversed: bool = False) -> None:
    """Mark a cell covered.

    A previous obstacle mark is only overridden when the robot physically
    traversed the cell (``traversed=True``); plain marking never downgrades
    an obstacle.
    """
    cx, cy = c
    state = m.cells[cx, cy]
    if state == COVERED:
        return
    if state == OBSTACLE and not traversed:
        return
    m.cells[cx, cy] = COVERED
    m.version += 1


def mark_obstacle(m: CoverageMap, c) -> None:
    """Mark a cell as a sensed obstacle (overrides covered)."""
    cx, cy = c
    if m.cells[cx, cy] == OBSTACLE:
        return
    m.cells[cx, cy] = OBSTACLE
    m.version += 1


def merge(a: CoverageMap, b: CoverageMap) -> CoverageMap:
    """Element-wise max of two maps, as a new map owned by ``a.owner``."""
    if a.cells.shape != b.cells.shape:
        raise ValueError(f"map dimension mismatch: {a.cells.shape} vs {b.cells.shape}")
    out = CoverageMap(a.owner, np.maximum(a.cells, b.cells), a.version)
    if not np.array_equal(out.cells, a.cells):
        out.version += 1
    return out


def merge_into(a: CoverageMap, others: list[np.ndarray]) -> None:
    """In-place max-merge of peer map snapshots into ``a``."""
    merged = a.cells
    for snap in others:
        if snap.shape != a.cells.shape:
            raise ValueError(f"map dimension mismatch: {a.cells.shape} vs {snap.shape}")
        merged = np.maximum(merged, snap)
    if not np.array_equal(merged, a.cells):
        a.cells[...] = merged
        a.version += 1


def coverage_fraction(m: CoverageMap, free_mask: np.ndarray | None = None) -> float:
    """Fraction of the cells-to-cover that are accounted for.

    The denominator is the set of ground-truth free cells when ``free_mask``
    is given (all cells otherwise).  A free cell counts as accounted for when
    its state is covered or obstacle: a false obstacle mark still means the
    cell has been dealt with, and real obstacle interiors are excluded from
    the denominator entirely.
    """
    if free_mask is None:
        free_mask = np.ones_like(m.cells, dtype=bool)
    n_free = int(np.count_nonzero(free_mask))
    if n_free == 0:
        return 1.0
    accounted = int(np.count_nonzero((m.cells > UNEXPLORED) & free_mask))
    return accounted / n_free


def rle_encode(m: CoverageMap) -> str:
    """Run-length encode the map row-major (Y rows, X ascending within a row).

    Format: comma-separated ``count:value`` pairs, e.g. ``"140:0,3:1,1:2"``.
    """
    flat = m.cells.T.ravel()  # row-major over Y rows
    parts = []
    run_val = int(flat[0])
    run_len = 1
    for v in flat[1:]:
        v = int(v)
        if v == run_val:
            run_len += 1
        else:
            parts.append(f"{run_len}:{run_val}")
            run_val, run_len = v, 1
    parts.append(f"{run_len}:{run_val}")
    return ",".join(parts)


def rle_decode(text: str, dims: tuple[int, int], owner: int = 0) -> CoverageMap:
    """Inverse of :func:`rle_encode`."""
    dim_x, dim_y = dims
    vals = np.empty(dim_x * dim_y, dtype=np.int8)
    pos = 0
    for part in text.split(","):
        count_s, val_s = part.split(":")
        count = int(count_s)
        vals[pos:pos + count] = int(val_s)
        pos += count
    if pos != dim_x * dim_y:
        raise ValueError(f"RLE length {pos} does not match dims {dims}")
    return CoverageMap(owner, vals.reshape(dim_y, dim_x).T.copy())
