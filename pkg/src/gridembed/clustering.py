"""Balanced KMeans and the full cluster tree built on top of it."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from .types import (BalanceError, ClusterNode, ClusterTree, InvalidArgumentError,
                    PointCloud)


@dataclass(frozen=True)
class BalanceParams:
    K: int
    alpha: float = 1.2
    max_kmeans_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise InvalidArgumentError("K must be positive")
        if not self.alpha >= 1:
            raise InvalidArgumentError("alpha must be >= 1")
        if self.max_kmeans_iters < 1:
            raise InvalidArgumentError("max_kmeans_iters must be positive")


def size_bound(n: int, K: int, alpha: float) -> int:
    """Largest cluster size allowed for ``n`` points in ``K`` clusters."""
    x = alpha * n / K
    # absorb float noise such as 1.2 * 2048 / 32 = 76.80000000000001
    return int(math.ceil(x - 1e-9 * max(1.0, x)))


def _points(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    return np.asarray(cloud, dtype=np.float64)


def _repair_empty(labels: np.ndarray, pts: np.ndarray, K: int) -> np.ndarray:
    labels = labels.copy()
    counts = np.bincount(labels, minlength=K)
    for k in range(K):
        if counts[k]:
            continue
        big = int(np.argmax(counts))
        members = np.flatnonzero(labels == big)
        center = pts[members].mean(axis=0)
        d = np.linalg.norm(pts[members] - center, axis=1)
        far = members[int(np.argmax(d))]
        labels[far] = k
        counts[big] -= 1
        counts[k] += 1
    return labels


def kmeans(cloud, params: BalanceParams) -> tuple[list, np.ndarray]:
    """KMeans with k-means++ seeding.

    Returns a list of sorted index arrays (one per cluster) and the ``(K, 3)``
    member means. Empty clusters are refilled from the largest one so that
    exactly ``K`` non-empty clusters come back.
    """
    pts = _points(cloud)
    n = pts.shape[0]
    K = params.K
    if K < 1 or K > n:
        raise InvalidArgumentError(f"K={K} is infeasible for {n} points")
    if K == n:
        labels = np.arange(n)
    elif K == 1:
        labels = np.zeros(n, dtype=np.int64)
    else:
        km = KMeans(n_clusters=K, init="k-means++", n_init=1,
                    max_iter=params.max_kmeans_iters,
                    random_state=np.uint32(params.seed & 0xFFFFFFFF))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            labels = km.fit_predict(pts).astype(np.int64)
        labels = _repair_empty(labels, pts, K)
    clusters = [np.flatnonzero(labels == k) for k in range(K)]
    centers = np.array([pts[c].mean(axis=0) for c in clusters])
    return clusters, centers


def balance(clusters: Sequence, centers, cloud, params: BalanceParams,
            trace: list | None = None) -> tuple[list, np.ndarray]:
    """Move points out of oversized clusters one at a time.

    Each step takes the largest cluster above the bound, sends its member
    nearest to the closest under-full cluster's center to that cluster, and
    recomputes both centers. Ties go to the lowest index. When ``trace`` is a
    list, ``(donor, receiver, point)`` is appended for every move.
    """
    pts = _points(cloud)
    n = pts.shape[0]
    K = len(clusters)
    if K != params.K:
        raise InvalidArgumentError(f"expected {params.K} clusters, got {K}")
    members = [list(np.sort(np.asarray(c, dtype=np.int64))) for c in clusters]
    if sum(len(m) for m in members) != n:
        raise InvalidArgumentError("clusters do not partition the cloud")
    sizes = np.array([len(m) for m in members], dtype=np.int64)
    cents = np.array(centers, dtype=np.float64).reshape(K, 3).copy()
    bound = size_bound(n, K, params.alpha)
    fair = n / K

    iters = 0
    while True:
        over = np.flatnonzero(sizes > bound)
        if over.size == 0:
            break
        iters += 1
        if iters > 10 * n:
            raise BalanceError(f"balancing did not finish within {10 * n} moves")
        donor = int(over[np.argmax(sizes[over])])
        open_ = np.flatnonzero(sizes < fair)
        if open_.size == 0:
            raise BalanceError("no cluster can receive points")
        dc = np.linalg.norm(cents[open_] - cents[donor], axis=1)
        recv = int(open_[np.argmin(dc)])
        cand = np.asarray(members[donor])
        dp = np.linalg.norm(pts[cand] - cents[recv], axis=1)
        pos = int(np.argmin(dp))
        p = int(cand[pos])

        del members[donor][pos]
        members[recv].insert(int(np.searchsorted(members[recv], p)), p)
        sizes[donor] -= 1
        sizes[recv] += 1
        for k in (donor, recv):
            cents[k] = pts[members[k]].mean(axis=0)
        if trace is not None:
            trace.append((donor, recv, p))

    return [np.asarray(m, dtype=np.int64) for m in members], cents


def balanced_kmeans(cloud, params: BalanceParams) -> tuple[list, np.ndarray]:
    clusters, centers = kmeans(cloud, params)
    return balance(clusters, centers, cloud, params)


def build_full_tree(cloud, levels: int, per_level_K: Sequence[int],
                    params: BalanceParams) -> ClusterTree:
    """Recursively split the cloud into a tree of balanced clusters.

    ``per_level_K[i]`` is the number of children of each cluster at level
    ``i + 1``; the clusters at level ``levels`` hold points directly.
    """
    pts = _points(cloud)
    n = pts.shape[0]
    if levels < 1:
        raise InvalidArgumentError("levels must be >= 1")
    if len(per_level_K) != levels - 1:
        raise InvalidArgumentError(
            f"need {levels - 1} per-level cluster counts, got {len(per_level_K)}")
    if n < 1:
        raise InvalidArgumentError("cannot cluster an empty cloud")

    all_idx = np.arange(n)
    root = ClusterNode(members=all_idx, center=pts.mean(axis=0), level=1)
    frontier = [root]
    for depth, K in enumerate(per_level_K, start=1):
        K = int(K)
        nxt = []
        for node_i, node in enumerate(frontier):
            if K < 1 or K > len(node.members):
                raise InvalidArgumentError(
                    f"level {depth}: K={K} is infeasible for a cluster of "
                    f"{len(node.members)} points")
            sub = pts[node.members]
            p = BalanceParams(K=K, alpha=params.alpha,
                              max_kmeans_iters=params.max_kmeans_iters,
                              seed=params.seed + 7919 * depth + node_i)
            clusters, centers = balanced_kmeans(sub, p)
            for c, ctr in zip(clusters, centers):
                child = ClusterNode(members=node.members[c], center=ctr, level=depth + 1)
                node.children.append(child)
                nxt.append(child)
        frontier = nxt

    counts = [1]
    for K in per_level_K:
        counts.append(counts[-1] * int(K))
    branching = [int(K) for K in per_level_K] + [n / counts[-1]]
    return ClusterTree(root=root, levels=levels, counts=counts, branching=branching)
