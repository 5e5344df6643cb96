"""Layout quality measures and the stage-timing harness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .types import GridLayout, InvalidArgumentError, PointCloud


@dataclass
class PipelineReport:
    stage_seconds: dict
    continuous_stress: list = field(default_factory=list)
    discrete_stress: list = field(default_factory=list)
    collision_count: int = 0
    collision_points: int = 0
    collision_ratio: float = 0.0
    pixel_sharing_points: int = 0
    pixel_sharing_ratio: float = 0.0
    occupancy: float = 0.0
    unconverged_layouts: int = 0

    def total_stress(self) -> tuple:
        return float(sum(self.continuous_stress)), float(sum(self.discrete_stress))


def discrete_stress(grid, distances) -> float:
    """Stress of integer cell positions, one cell being one unit of length."""
    from .layout import stress

    cells = grid.cells if isinstance(grid, GridLayout) else np.asarray(grid)
    return stress(np.asarray(cells, dtype=np.float64).reshape(-1, 2), distances)


def _knn(coords: np.ndarray, k: int) -> np.ndarray:
    n = coords.shape[0]
    # ask for spares so self can be dropped even when duplicates tie at 0
    _, idx = cKDTree(coords).query(coords, k=min(n, k + 1))
    idx = np.asarray(idx).reshape(n, -1)
    out = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        row = [j for j in idx[i] if j != i]
        out[i] = row[:k]
    return out


def neighborhood_preservation(cloud, image, k: int) -> float:
    """Mean fraction of each point's 3D k-nearest neighbors that are also its
    k-nearest neighbors in pixel space."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    pix = image.pixel_of_point if hasattr(image, "pixel_of_point") else np.asarray(image)
    n = pts.shape[0]
    if not 1 <= k < n:
        raise InvalidArgumentError(f"k={k} must be in [1, {n - 1}]")
    a = _knn(pts, k)
    b = _knn(np.asarray(pix, dtype=np.float64), k)
    hits = sum(len(set(a[i]).intersection(b[i])) for i in range(n))
    return hits / (n * k)


def timing_harness(sizes, config=None, repeats: int = 3, seed: int = 0,
                   cloud_factory=None) -> list:
    """Time every pipeline stage on seeded synthetic clouds.

    Returns rows ``(n, stage, mean_ms, std_ms)``, sizes in the given order
    and stages in pipeline order.
    """
    from .embed import STAGES, PipelineConfig, run_pipeline
    from .synthetic import part_cloud

    config = config or PipelineConfig(clusters=0)
    factory = cloud_factory or part_cloud
    if any(int(n) < 1 for n in sizes):
        raise InvalidArgumentError("sizes must be positive")
    if repeats < 1:
        raise InvalidArgumentError("repeats must be >= 1")
    # compile kernels outside the timed region
    run_pipeline(factory(64, seed), PipelineConfig(levels=1, graph_mode=config.graph_mode))

    rows = []
    for n in sizes:
        n = int(n)
        samples = {s: [] for s in STAGES}
        for r in range(repeats):
            _, rep = run_pipeline(factory(n, seed + r), config)
            for s in STAGES:
                samples[s].append(rep.stage_seconds[s] * 1e3)
        for s in STAGES:
            v = np.array(samples[s])
            rows.append((n, s, float(v.mean()), float(v.std())))
    return rows


def loglog_slope(sizes, values) -> float:
    x = np.log(np.asarray(sizes, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    return float(np.polyfit(x, y, 1)[0])

