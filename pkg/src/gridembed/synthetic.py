"""Seeded synthetic point clouds for benchmarks and tests."""

from __future__ import annotations

import numpy as np

from .types import PointCloud


def part_cloud(n: int, seed: int = 0, parts: int = 4) -> PointCloud:
    """Points sampled on the surfaces of a few random ellipsoids.

    Each ellipsoid is one labeled part, loosely mimicking a segmented CAD
    shape. Part sizes follow a seeded multinomial split of ``n``.
    """
    rng = np.random.default_rng(seed)
    parts = max(1, min(parts, n))
    sizes = rng.multinomial(n - parts, np.full(parts, 1.0 / parts)) + 1
    chunks, labels = [], []
    for p, m in enumerate(sizes):
        v = rng.normal(size=(m, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        radii = rng.uniform(0.15, 0.5, size=3)
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        center = rng.uniform(-0.6, 0.6, size=3)
        chunks.append((v * radii) @ q.T + center)
        labels.append(np.full(m, p))
    pts = np.concatenate(chunks)
    lab = np.concatenate(labels)
    order = rng.permutation(n)
    return PointCloud(pts[order], lab[order])


def blob_cloud(n: int, centers, spread: float = 0.05, seed: int = 0) -> PointCloud:
    """Isotropic Gaussian blobs, ``n`` points split evenly; labels are blob ids."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=np.float64)
    k = len(centers)
    lab = np.arange(n) % k
    pts = centers[lab] + rng.normal(scale=spread, size=(n, 3))
    return PointCloud(pts, lab)
