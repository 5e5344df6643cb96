"""Shared data model for the point-cloud-to-grid pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

EMPTY_LABEL = -1


class GridEmbedError(Exception):
    """Base class for pipeline errors."""


class InvalidArgumentError(GridEmbedError, ValueError):
    pass


class DegenerateInputError(GridEmbedError, ValueError):
    pass


class BalanceError(GridEmbedError, RuntimeError):
    pass


class CapacityError(GridEmbedError, ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, 3)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidArgumentError(f"points must have shape (n, 3), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("point coordinates must be finite")
        object.__setattr__(self, "points", _frozen(pts))
        if self.labels is not None:
            lab = np.array(self.labels, dtype=np.int64).reshape(-1)
            if lab.shape[0] != pts.shape[0]:
                raise InvalidArgumentError(
                    f"got {lab.shape[0]} labels for {pts.shape[0]} points")
            if np.any(lab < 0):
                raise InvalidArgumentError("labels must be non-negative")
            object.__setattr__(self, "labels", _frozen(lab))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None


@dataclass(frozen=True)
class SpatialGraph:
    """Vertices, undirected edges and the pairwise target distances ``s_ij``.

    ``disconnected`` is set when some pairs had no path and were assigned the
    fallback distance; ``duplicate_pairs`` counts zero-length pairs that were
    forced to distance 1 in Euclidean mode.
    """

    vertex_count: int
    edges: np.ndarray
    distances: np.ndarray
    disconnected: bool = False
    duplicate_pairs: int = 0

    def __post_init__(self):
        n = int(self.vertex_count)
        if n < 1:
            raise InvalidArgumentError("vertex_count must be positive")
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise InvalidArgumentError("edge index out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise InvalidArgumentError("self-loops are not allowed")
        d = np.asarray(self.distances, dtype=np.float64)
        if d.shape != (n, n):
            raise InvalidArgumentError(f"distance matrix must be {n}x{n}, got {d.shape}")
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "edges", _frozen(e.copy()))
        object.__setattr__(self, "distances", _frozen(d.copy()))

    def validate(self) -> None:
        d = self.distances
        if not np.array_equal(d, d.T):
            raise InvalidArgumentError("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0):
            raise InvalidArgumentError("distance matrix must have a zero diagonal")
        off = ~np.eye(self.vertex_count, dtype=bool)
        if np.any(d[off] < 1):
            raise InvalidArgumentError("off-diagonal distances must be >= 1")


@dataclass(frozen=True)
class Layout2D:
    """Continuous 2D coordinates, one row per vertex.

    Layouts produced by the optimizer also carry the stress after every
    accepted step and whether the stopping rule fired before ``max_iters``.
    """

    coords: np.ndarray
    stress_history: tuple = ()
    converged: bool = True

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(c)):
            raise InvalidArgumentError("layout coordinates must be finite")
        object.__setattr__(self, "coords", _frozen(c))

    def __len__(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class GridLayout:
    cells: np.ndarray
    grid_extent: tuple

    def __post_init__(self):
        c = np.array(self.cells, dtype=np.int64).reshape(-1, 2)
        rows, cols = (int(v) for v in self.grid_extent)
        if c.size and (c[:, 0].min() < 0 or c[:, 0].max() >= rows
                       or c[:, 1].min() < 0 or c[:, 1].max() >= cols):
            raise InvalidArgumentError("grid cell outside grid extent")
        object.__setattr__(self, "cells", _frozen(c))
        object.__setattr__(self, "grid_extent", (rows, cols))

    def __len__(self) -> int:
        return self.cells.shape[0]

    def is_injective(self) -> bool:
        return len({tuple(c) for c in self.cells.tolist()}) == len(self)


@dataclass
class ClusterNode:
    members: np.ndarray
    center: np.ndarray
    level: int
    children: list = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class ClusterTree:
    """Full tree of balanced clusters.

    Level 1 is the root holding every point. ``counts[i]`` is the number of
    clusters at level ``i + 1`` and ``branching[i]`` the (mean) number of
    sub-clusters, or points at the deepest level, per cluster.
    """

    root: ClusterNode
    levels: int
    counts: list
    branching: list

    def nodes_at(self, level: int) -> list:
        out = [self.root]
        for _ in range(level - 1):
            out = [c for node in out for c in node.children]
        return out

    def leaves(self) -> list:
        return self.nodes_at(self.levels)

    def check_partition(self) -> bool:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.children:
                parts = [set(c.members.tolist()) for c in node.children]
                union = set().union(*parts)
                if sum(len(p) for p in parts) != len(union):
                    return False
                if union != set(node.members.tolist()):
                    return False
                stack.extend(node.children)
        return True


@dataclass(frozen=True)
class CollisionRecord:
    """Points that rounded onto the same pixel.

    ``resolved`` records carry the pixel each colliding point was moved to by
    repair; unresolved ones (analysis mode) share ``pixel`` with the
    representative.
    """

    pixel: tuple
    representative: int
    colliding: tuple
    resolved: bool = False
    final_pixels: tuple = ()

    def to_json(self) -> dict:
        d = {"pixel": list(self.pixel), "representative": self.representative,
             "colliding": list(self.colliding), "resolved": self.resolved}
        if self.resolved:
            d["final_pixels"] = [list(p) for p in self.final_pixels]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CollisionRecord":
        return cls(pixel=tuple(d["pixel"]), representative=int(d["representative"]),
                   colliding=tuple(int(i) for i in d["colliding"]),
                   resolved=bool(d.get("resolved", False)),
                   final_pixels=tuple(tuple(p) for p in d.get("final_pixels", ())))


@dataclass(frozen=True)
class CloudImage:
    features: np.ndarray
    mask: Optional[np.ndarray]
    pixel_of_point: np.ndarray
    collisions: tuple = ()
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple:
        return self.features.shape[:2]

    def occupied(self) -> np.ndarray:
        occ = np.zeros(self.shape, dtype=bool)
        if len(self.pixel_of_point):
            occ[self.pixel_of_point[:, 0], self.pixel_of_point[:, 1]] = True
        return occ

    def validate(self) -> None:
        h, w = self.shape
        pop = self.pixel_of_point
        if pop.ndim != 2 or pop.shape[1] != 2:
            raise InvalidArgumentError("pixel_of_point must have shape (n, 2)")
        if pop.size and (pop.min() < 0 or pop[:, 0].max() >= h or pop[:, 1].max() >= w):
            raise InvalidArgumentError("pixel_of_point outside image")
        if self.mask is not None:
            if self.mask.shape != (h, w):
                raise InvalidArgumentError("mask shape does not match features")
            if not np.array_equal(self.mask != EMPTY_LABEL, self.occupied()):
                raise InvalidArgumentError("mask occupancy does not match pixel_of_point")
        for rec in self.collisions:
            if rec.resolved:
                continue
            for i in rec.colliding:
                if tuple(pop[i]) != tuple(rec.pixel):
                    raise InvalidArgumentError(
                        f"colliding point {i} is not mapped to pixel {rec.pixel}")
