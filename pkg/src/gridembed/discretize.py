"""Rounding a continuous layout onto a bounded integer grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .types import CapacityError, GridEmbedError, GridLayout, InvalidArgumentError, Layout2D


@dataclass(frozen=True)
class DiscretizeParams:
    grid_extent: tuple = (16, 16)
    max_repair_iters: Optional[int] = None

    def __post_init__(self):
        rows, cols = self.grid_extent
        if rows < 1 or cols < 1:
            raise InvalidArgumentError("grid extent must be positive")

    @property
    def capacity(self) -> int:
        return self.grid_extent[0] * self.grid_extent[1]


@dataclass(frozen=True)
class RoundingResult:
    coords: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    degenerate_axes: tuple


def round_half_away(x: np.ndarray) -> np.ndarray:
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def normalize_and_round(layout) -> RoundingResult:
    """Standardize each axis, scale by ``sqrt(n)`` and round to integers.

    An axis with zero spread keeps unit scale and is reported in
    ``degenerate_axes``.
    """
    X = layout.coords if isinstance(layout, Layout2D) else np.asarray(layout, dtype=np.float64)
    X = X.reshape(-1, 2)
    n = X.shape[0]
    if n < 1:
        raise InvalidArgumentError("need at least one vertex")
    a = X.mean(axis=0)
    b = X.std(axis=0)
    degenerate = tuple(int(k) for k in np.flatnonzero(b == 0))
    b = np.where(b == 0, 1.0, b)
    coords = round_half_away((X - a) / b * np.sqrt(n))
    return RoundingResult(coords, a, b, degenerate)


def clamp_to_grid(coords, grid_extent) -> np.ndarray:
    """Center the occupied bounding box in the grid, then clip to its bounds."""
    c = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    ext = np.asarray(grid_extent, dtype=np.int64)
    if c.shape[0] == 0:
        return c.copy()
    lo = c.min(axis=0)
    span = c.max(axis=0) - lo + 1
    shift = (ext - span) // 2 - lo
    return np.clip(c + shift, 0, ext - 1)


def collision_groups(cells) -> dict:
    """Map each cell shared by several vertices to their indices, ascending."""
    c = np.asarray(cells, dtype=np.int64).reshape(-1, 2)
    groups: dict = {}
    for i, cell in enumerate(map(tuple, c.tolist())):
        groups.setdefault(cell, []).append(i)
    return {cell: idx for cell, idx in groups.items() if len(idx) > 1}


def resolve_collisions(coords, grid_extent, max_repair_iters: Optional[int] = None) -> GridLayout:
    """Make the cell assignment injective.

    Vertices are visited in index order; the first to reach a cell keeps it
    and every later one is moved to the closest cell no vertex occupies,
    ties broken row-major.
    """
    c = np.array(coords, dtype=np.int64).reshape(-1, 2)
    rows, cols = (int(v) for v in grid_extent)
    n = c.shape[0]
    if n > rows * cols:
        raise CapacityError(f"{n} vertices do not fit a {rows}x{cols} grid")
    if n and (c.min() < 0 or c[:, 0].max() >= rows or c[:, 1].max() >= cols):
        raise InvalidArgumentError("coordinates must be clamped to the grid first")
    limit = rows * cols if max_repair_iters is None else max_repair_iters

    count = np.zeros((rows, cols), dtype=np.int64)
    np.add.at(count, (c[:, 0], c[:, 1]), 1)
    if count.max(initial=0) <= 1:
        return GridLayout(c, (rows, cols))

    rr, cc = np.indices((rows, cols))
    claimed = np.zeros((rows, cols), dtype=bool)
    moves = 0
    for i in range(n):
        r, q = c[i]
        if not claimed[r, q]:
            claimed[r, q] = True
            continue
        moves += 1
        if moves > limit:
            raise GridEmbedError(f"collision repair exceeded {limit} moves")
        d2 = (rr - r) ** 2 + (cc - q) ** 2
        d2 = np.where(count == 0, d2, np.iinfo(np.int64).max)
        flat = int(np.argmin(d2))
        if count.flat[flat] != 0:
            raise GridEmbedError("no empty cell left during collision repair")
        nr, nq = divmod(flat, cols)
        count[r, q] -= 1
        count[nr, nq] += 1
        claimed[nr, nq] = True
        c[i] = (nr, nq)
    return GridLayout(c, (rows, cols))


def discretize(layout, params: DiscretizeParams = DiscretizeParams(),
               repair: bool = True) -> tuple[np.ndarray, GridLayout]:
    """Round, clamp and (optionally) repair; returns pre-repair cells and the result."""
    rounded = normalize_and_round(layout).coords
    n = rounded.shape[0]
    if n > params.capacity:
        raise CapacityError(f"{n} vertices do not fit a {params.grid_extent} grid")
    clamped = clamp_to_grid(rounded, params.grid_extent)
    if not repair:
        return clamped, GridLayout(clamped, params.grid_extent)
    return clamped, resolve_collisions(clamped, params.grid_extent, params.max_repair_iters)
