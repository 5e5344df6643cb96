"""Graph construction over 3D points and the pairwise distances to preserve."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path
from scipy.spatial import Delaunay, QhullError, cKDTree

from .types import DegenerateInputError, InvalidArgumentError, SpatialGraph

# relative singular-value cutoff below which an axis counts as flat
RANK_TOL = 1e-9


@dataclass(frozen=True)
class GraphMode:
    kind: str = "delaunay"
    k: int = 20

    KINDS = ("delaunay", "knn", "euclidean")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidArgumentError(f"unknown graph mode {self.kind!r}")
        if self.kind == "knn" and self.k < 1:
            raise InvalidArgumentError("knn k must be >= 1")


DELAUNAY = GraphMode("delaunay")
EUCLIDEAN = GraphMode("euclidean")


def knn_mode(k: int = 20) -> GraphMode:
    return GraphMode("knn", k)


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise InvalidArgumentError("points must be a 2D array")
    if not np.all(np.isfinite(pts)):
        raise InvalidArgumentError("points must be finite")
    return pts


def _edge_array(pairs) -> np.ndarray:
    if len(pairs) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    e = np.sort(np.asarray(pairs, dtype=np.int64).reshape(-1, 2), axis=1)
    e = e[e[:, 0] != e[:, 1]]
    return np.unique(e, axis=0)


def _principal_frame(pts: np.ndarray) -> tuple[np.ndarray, int]:
    centered = pts - pts.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[0] == 0:
        return centered, 0
    rank = int(np.sum(s > RANK_TOL * s[0]))
    return centered @ vt[:rank].T, rank


def _simplices(coords: np.ndarray):
    try:
        return Delaunay(coords).simplices
    except QhullError:
        return None


def delaunay_simplices(points) -> tuple[np.ndarray, int]:
    """Simplices of the Delaunay triangulation and the dimension it was built in.

    Full-rank 3D input gives tetrahedra (``(m, 4)``). Flat input is projected
    onto its principal axes and triangulated in 2D (triangles) or 1D
    (consecutive segments along the line).
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 2:
        raise InvalidArgumentError("need at least 2 points")
    coords, rank = _principal_frame(pts)
    if rank == 0:
        raise DegenerateInputError("all points are identical")
    while rank >= 2:
        if n > rank:
            simp = _simplices(coords[:, :rank])
            if simp is not None and len(simp):
                return np.asarray(simp, dtype=np.int64), rank
        rank -= 1
    order = np.argsort(coords[:, 0], kind="stable")
    return np.stack([order[:-1], order[1:]], axis=1).astype(np.int64), 1


def delaunay_edges(points) -> np.ndarray:
    """Edges of the Delaunay triangulation, each as a sorted index pair.

    Points Qhull drops (exact duplicates, points it deems coplanar) are tied
    to their nearest triangulated point so the graph stays connected.
    """
    pts = _as_points(points)
    simp, _ = delaunay_simplices(pts)
    m = simp.shape[1]
    pairs = [simp[:, [a, b]] for a in range(m) for b in range(a + 1, m)]
    edges = np.concatenate(pairs, axis=0)
    used = np.zeros(pts.shape[0], dtype=bool)
    used[simp.ravel()] = True
    if not used.all():
        inside = np.flatnonzero(used)
        tree = cKDTree(pts[inside])
        missing = np.flatnonzero(~used)
        _, nearest = tree.query(pts[missing])
        edges = np.concatenate([edges, np.stack([missing, inside[nearest]], axis=1)])
    return _edge_array(edges)


def knn_edges(points, k: int) -> np.ndarray:
    """Symmetric closure of the k-nearest-neighbor relation."""
    pts = _as_points(points)
    n = pts.shape[0]
    if k < 1 or k >= n:
        raise InvalidArgumentError(f"k={k} must be in [1, {n - 1}]")
    _, idx = cKDTree(pts).query(pts, k=k + 1)
    pairs = []
    for i in range(n):
        nbrs = [j for j in idx[i] if j != i][:k]
        pairs.extend((i, j) for j in nbrs)
    return _edge_array(pairs)


def shortest_path_distances(edges, n: int) -> tuple[np.ndarray, bool]:
    """Unweighted hop counts between all vertex pairs.

    Unreachable pairs get the largest finite distance plus one; the second
    return value says whether that happened.
    """
    if n < 1:
        raise InvalidArgumentError("n must be positive")
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
    d = shortest_path(adj, method="D", directed=False, unweighted=True)
    inf = ~np.isfinite(d)
    if inf.any():
        finite_max = d[~inf].max() if (~inf).any() else 0.0
        d[inf] = finite_max + 1
        return d, True
    return d, False


def euclidean_distances(points) -> tuple[np.ndarray, int]:
    """Pairwise 3D distances scaled so the smallest nonzero one equals 1.

    Coincident pairs are set to 1; their count is returned alongside.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    off = ~np.eye(n, dtype=bool)
    pos = d[off & (d > 0)]
    if pos.size:
        d = d / pos.min()
    dup = off & (d == 0)
    d[dup] = 1.0
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d, int(dup.sum() // 2)


def build_graph(points, mode: GraphMode = DELAUNAY) -> SpatialGraph:
    """Build the graph and distance matrix for ``points`` under ``mode``."""
    pts = _as_points(points)
    n = pts.shape[0]
    if n == 1:
        return SpatialGraph(1, np.zeros((0, 2), dtype=np.int64), np.zeros((1, 1)))
    if mode.kind == "euclidean":
        d, dup = euclidean_distances(pts)
        return SpatialGraph(n, np.zeros((0, 2), dtype=np.int64), d, duplicate_pairs=dup)
    if mode.kind == "knn":
        edges = knn_edges(pts, min(mode.k, n - 1))
    else:
        try:
            edges = delaunay_edges(pts)
        except DegenerateInputError:
            # all points coincide: any connected graph is as good as another
            edges = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
    d, disconnected = shortest_path_distances(edges, n)
    return SpatialGraph(n, edges, d, disconnected=disconnected)
