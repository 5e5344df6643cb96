"""End-to-end projection of a point cloud into a nested grid image."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from .clustering import BalanceParams, build_full_tree
from .discretize import (clamp_to_grid, collision_groups, normalize_and_round,
                         resolve_collisions)
from .graph import DELAUNAY, GraphMode, build_graph
from .layout import LayoutParams, kk_layout, stress
from .metrics import PipelineReport, discrete_stress
from .types import (EMPTY_LABEL, CapacityError, CloudImage, CollisionRecord,
                    InvalidArgumentError, PointCloud)

STAGES = ("clustering", "triangulation", "layout", "discretization", "assembly")


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline settings.

    ``clusters`` is the top-level K, a list of per-level K values (one per
    level below the root), or 0 for ``round(n ** (1 / levels))`` at every
    level. The root lays out on ``higher_grid`` and every deeper level except
    the last does too; the last level (points) uses ``lower_grid``.
    """

    graph_mode: GraphMode = DELAUNAY
    levels: int = 2
    clusters: Union[int, tuple] = 32
    alpha: float = 1.2
    lower_grid: tuple = (16, 16)
    higher_grid: tuple = (16, 16)
    layout: LayoutParams = LayoutParams()
    seed: int = 0
    repair_collisions: bool = True
    normalize_features: bool = False

    def __post_init__(self):
        if self.levels < 1:
            raise InvalidArgumentError("levels must be >= 1")
        if isinstance(self.clusters, (list, tuple)):
            object.__setattr__(self, "clusters", tuple(int(k) for k in self.clusters))
            if len(self.clusters) != self.levels - 1:
                raise InvalidArgumentError(
                    f"need {self.levels - 1} per-level cluster counts, got {len(self.clusters)}")
        object.__setattr__(self, "lower_grid", tuple(int(v) for v in self.lower_grid))
        object.__setattr__(self, "higher_grid", tuple(int(v) for v in self.higher_grid))

    def grids(self) -> list:
        return [self.higher_grid] * (self.levels - 1) + [self.lower_grid]

    def image_extent(self) -> tuple:
        g = np.array(self.grids(), dtype=np.int64)
        return int(g[:, 0].prod()), int(g[:, 1].prod())

    def per_level_k(self, n: int) -> list:
        if self.levels == 1:
            return []
        if isinstance(self.clusters, tuple):
            return list(self.clusters)
        if self.clusters == 0:
            k = max(1, int(round(n ** (1.0 / self.levels))))
            return [k] * (self.levels - 1)
        return [int(self.clusters)] + [int(self.clusters)] * (self.levels - 2)

    def to_json(self) -> dict:
        d = asdict(self)
        d["graph_mode"] = {"kind": self.graph_mode.kind, "k": self.graph_mode.k}
        d["clusters"] = list(self.clusters) if isinstance(self.clusters, tuple) else self.clusters
        d["lower_grid"] = list(self.lower_grid)
        d["higher_grid"] = list(self.higher_grid)
        return d


def _node_seed(seed: int, level: int, index: int) -> int:
    return int(np.random.SeedSequence([seed & 0xFFFFFFFF, level, index]).generate_state(1)[0])


def _draw(points: np.ndarray, extent: tuple, config: PipelineConfig, level: int,
          index: int, repair: bool, times: dict, name: str) -> tuple:
    m = points.shape[0]
    cap = extent[0] * extent[1]
    if m > cap:
        raise CapacityError(f"{name} has {m} members but the {extent[0]}x{extent[1]} "
                            f"grid holds {cap}; raise the grid size or K")
    t = time.perf_counter()
    graph = build_graph(points, config.graph_mode)
    times["triangulation"] += time.perf_counter() - t

    t = time.perf_counter()
    lp = LayoutParams(max_iters=config.layout.max_iters,
                      convergence_tol=config.layout.convergence_tol,
                      patience=config.layout.patience, init=config.layout.init,
                      seed=_node_seed(config.seed, level, index))
    lay = kk_layout(graph, lp)
    times["layout"] += time.perf_counter() - t

    t = time.perf_counter()
    rounded = normalize_and_round(lay).coords
    clamped = clamp_to_grid(rounded, extent)
    cells = resolve_collisions(clamped, extent).cells if repair else clamped
    times["discretization"] += time.perf_counter() - t
    return graph, lay, rounded, clamped, cells


def run_pipeline(cloud: PointCloud, config: PipelineConfig = PipelineConfig()
                 ) -> tuple[CloudImage, PipelineReport]:
    """Project ``cloud`` and return the image together with stage timings."""
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(cloud)
    pts = cloud.points
    n = len(cloud)
    if n < 1:
        raise InvalidArgumentError("cannot project an empty cloud")
    times = dict.fromkeys(STAGES, 0.0)
    grids = config.grids()
    L = config.levels

    t = time.perf_counter()
    ks = config.per_level_k(n)
    tree = build_full_tree(pts, L, ks, BalanceParams(K=max(ks, default=1),
                                                     alpha=config.alpha, seed=config.seed))
    times["clustering"] += time.perf_counter() - t

    # patch size contributed by one cell at each level
    patch = [(1, 1)] * L
    for lvl in range(L - 2, -1, -1):
        patch[lvl] = (patch[lvl + 1][0] * grids[lvl + 1][0], patch[lvl + 1][1] * grids[lvl + 1][1])

    pixel_of_point = np.zeros((n, 2), dtype=np.int64)
    records: list = []
    rounding_colliders = 0
    pixel_colliders = 0
    cont_stress: list = []
    disc_stress: list = []
    unconverged = 0

    frontier = [(tree.root, np.zeros(2, dtype=np.int64))]
    for lvl in range(1, L + 1):
        extent = grids[lvl - 1]
        step = np.array(patch[lvl - 1], dtype=np.int64)
        nxt = []
        for idx, (node, offset) in enumerate(frontier):
            leaf = lvl == L
            if leaf:
                items = pts[node.members]
                name = f"cluster {idx} at level {lvl}"
            else:
                items = np.array([c.center for c in node.children])
                name = f"cluster {idx} at level {lvl} (children)"
            repair = config.repair_collisions or not leaf
            graph, lay, rounded, clamped, cells = _draw(items, extent, config, lvl, idx,
                                                        repair, times, name)
            cont_stress.append(stress(lay, graph))
            disc_stress.append(discrete_stress(cells, graph))
            unconverged += not lay.converged

            t = time.perf_counter()
            global_cells = offset + cells * step
            if leaf:
                ids = node.members
                pixel_of_point[ids] = global_cells
                rounding_colliders += sum(len(g) for g in collision_groups(rounded).values())
                groups = collision_groups(clamped)
                pixel_colliders += sum(len(g) for g in groups.values())
                rng = np.random.default_rng(_node_seed(config.seed, lvl, idx) ^ 0x5EED)
                for cell, members in sorted(groups.items()):
                    pix = tuple(int(v) for v in offset + np.array(cell) * step)
                    if repair:
                        rep, others = members[0], members[1:]
                        records.append(CollisionRecord(
                            pixel=pix, representative=int(ids[rep]),
                            colliding=tuple(int(ids[o]) for o in others), resolved=True,
                            final_pixels=tuple(tuple(int(v) for v in global_cells[o])
                                               for o in others)))
                    else:
                        rep = members[int(rng.integers(len(members)))]
                        records.append(CollisionRecord(
                            pixel=pix, representative=int(ids[rep]),
                            colliding=tuple(int(ids[o]) for o in members if o != rep)))
            else:
                for child, gc in zip(node.children, global_cells):
                    nxt.append((child, gc))
            times["assembly"] += time.perf_counter() - t
        frontier = nxt

    t = time.perf_counter()
    H, W = config.image_extent()
    feats = pts
    if config.normalize_features:
        centered = pts - pts.mean(axis=0)
        r = np.linalg.norm(centered, axis=1).max()
        feats = centered / r if r > 0 else centered
    features = np.zeros((H, W, 3), dtype=np.float64)
    owner = np.arange(n)
    for rec in records:
        if not rec.resolved:
            owner[list(rec.colliding)] = rec.representative
    # points overwritten by their representative write the representative's values
    features[pixel_of_point[:, 0], pixel_of_point[:, 1]] = feats[owner]
    mask = None
    if cloud.has_labels:
        mask = np.full((H, W), EMPTY_LABEL, dtype=np.int64)
        mask[pixel_of_point[:, 0], pixel_of_point[:, 1]] = cloud.labels[owner]
    image = CloudImage(features=features, mask=mask, pixel_of_point=pixel_of_point,
                       collisions=tuple(records),
                       meta={"config": config.to_json(), "seed": config.seed,
                             "per_level_k": ks})
    times["assembly"] += time.perf_counter() - t

    occupied = int(image.occupied().sum())
    report = PipelineReport(
        stage_seconds=times, continuous_stress=cont_stress, discrete_stress=disc_stress,
        collision_count=len(records), collision_points=rounding_colliders,
        collision_ratio=rounding_colliders / n, pixel_sharing_points=pixel_colliders,
        pixel_sharing_ratio=pixel_colliders / n, occupancy=occupied / (H * W),
        unconverged_layouts=unconverged)
    return image, report


def project(cloud: PointCloud, config: PipelineConfig = PipelineConfig()) -> CloudImage:
    return run_pipeline(cloud, config)[0]


def unproject(image: CloudImage, predicted_mask) -> np.ndarray:
    """Per-point labels read back from a predicted label image.

    Points that shared a pixel with a collision representative read that
    pixel, so they inherit the representative's prediction.
    """
    m = np.asarray(predicted_mask)
    if m.shape[:2] != image.shape:
        raise InvalidArgumentError(
            f"mask shape {m.shape[:2]} does not match image shape {image.shape}")
    pop = image.pixel_of_point.copy()
    for rec in image.collisions:
        if not rec.resolved:
            pop[list(rec.colliding)] = rec.pixel
    return m[pop[:, 0], pop[:, 1]]
