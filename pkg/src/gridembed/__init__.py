"""Topology-preserving projection of 3D point clouds onto 2D grid images."""

from .clustering import BalanceParams, balance, build_full_tree, kmeans
from .discretize import (DiscretizeParams, clamp_to_grid, normalize_and_round,
                         resolve_collisions)
from .embed import PipelineConfig, project, run_pipeline, unproject
from .graph import (GraphMode, build_graph, delaunay_edges, euclidean_distances,
                    knn_edges, shortest_path_distances)
from .layout import LayoutParams, fr_init, kk_layout, stress, stress_gradient
from .metrics import (PipelineReport, discrete_stress, neighborhood_preservation,
                      timing_harness)
from .types import (BalanceError, CapacityError, CloudImage, ClusterTree,
                    DegenerateInputError, GridEmbedError, GridLayout,
                    InvalidArgumentError, Layout2D, PointCloud, SpatialGraph)

__version__ = "0.1.0"

__all__ = [
    "BalanceError",
    "BalanceParams",
    "CapacityError",
    "CloudImage",
    "ClusterTree",
    "DegenerateInputError",
    "DiscretizeParams",
    "GraphMode",
    "GridEmbedError",
    "GridLayout",
    "InvalidArgumentError",
    "Layout2D",
    "LayoutParams",
    "PipelineConfig",
    "PipelineReport",
    "PointCloud",
    "SpatialGraph",
    "balance",
    "build_full_tree",
    "build_graph",
    "clamp_to_grid",
    "delaunay_edges",
    "discrete_stress",
    "euclidean_distances",
    "fr_init",
    "kk_layout",
    "kmeans",
    "knn_edges",
    "neighborhood_preservation",
    "normalize_and_round",
    "project",
    "resolve_collisions",
    "run_pipeline",
    "shortest_path_distances",
    "stress",
    "stress_gradient",
    "timing_harness",
    "unproject",
]
