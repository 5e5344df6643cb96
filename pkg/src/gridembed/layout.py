"""Continuous 2D stress layout (the relaxation solved before rounding)."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .types import InvalidArgumentError, Layout2D, SpatialGraph

log = logging.getLogger(__name__)

FR_ITERS = 50
# starting temperature as a fraction of the initial frame width
FR_START_TEMP = 0.3
INITS = ("fr", "circle", "random")


@dataclass(frozen=True)
class LayoutParams:
    max_iters: int = 300
    convergence_tol: float = 1e-4
    patience: int = 5
    init: str = "fr"
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidArgumentError("max_iters must be >= 1")
        if not self.convergence_tol > 0:
            raise InvalidArgumentError("convergence_tol must be > 0")
        if self.init not in INITS:
            raise InvalidArgumentError(f"unknown init {self.init!r}")


def _coords(layout) -> np.ndarray:
    if isinstance(layout, Layout2D):
        return layout.coords
    return np.ascontiguousarray(np.asarray(layout, dtype=np.float64).reshape(-1, 2))


def _distances(distances) -> np.ndarray:
    if isinstance(distances, SpatialGraph):
        return distances.distances
    return np.asarray(distances, dtype=np.float64)


def _inverse(d: np.ndarray) -> np.ndarray:
    inv = np.zeros_like(d)
    off = ~np.eye(d.shape[0], dtype=bool)
    inv[off] = 1.0 / d[off]
    return inv


def stress(layout, distances) -> float:
    """Sum over unordered pairs of ``(|x_i - x_j| / s_ij - 1) ** 2``."""
    X = _coords(layout)
    d = _distances(distances)
    if d.shape != (len(X), len(X)):
        raise InvalidArgumentError("layout size does not match distance matrix")
    if len(X) < 2:
        return 0.0
    return float(_kernels.stress(np.ascontiguousarray(X), _inverse(d)))


def stress_gradient(layout, distances) -> np.ndarray:
    """Analytic gradient of :func:`stress`, shape ``(n, 2)``.

    Exactly coincident vertices are nudged apart by a fixed 1e-9 offset so
    the direction term is defined.
    """
    X = np.ascontiguousarray(_coords(layout), dtype=np.float64)
    d = _distances(distances)
    if d.shape != (len(X), len(X)):
        raise InvalidArgumentError("layout size does not match distance matrix")
    G = np.zeros_like(X)
    if len(X) >= 2:
        _kernels.stress_and_grad(X, _inverse(d), G)
    return G


def _random_start(n: int, seed: int) -> np.ndarray:
    side = np.sqrt(n)
    return np.random.default_rng(seed).uniform(-side / 2, side / 2, size=(n, 2))


def _edge_lists(graph: SpatialGraph) -> tuple:
    e = np.ascontiguousarray(graph.edges, dtype=np.int64)
    return np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1])


def _fr_coords(graph: SpatialGraph, seed: int) -> np.ndarray:
    n = graph.vertex_count
    if n == 1:
        return np.zeros((1, 2))
    X = _random_start(n, seed)
    eu, ev = _edge_lists(graph)
    _kernels.spring_layout(X, graph.distances, eu, ev, FR_ITERS, FR_START_TEMP * np.sqrt(n),
                           0, 1.0, 1, np.empty(1))
    return X


def fr_init(graph: SpatialGraph, seed: int = 0) -> Layout2D:
    """Spring-embedder layout used to seed the stress optimizer."""
    return Layout2D(_fr_coords(graph, seed))


def initial_layout(graph: SpatialGraph, params: LayoutParams) -> np.ndarray:
    n = graph.vertex_count
    if params.init == "fr":
        return _fr_coords(graph, params.seed)
    if params.init == "circle":
        theta = 2 * np.pi * np.arange(n) / n
        r = n / (2 * np.pi) if n > 1 else 0.0
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    return _random_start(n, params.seed)


def kk_layout(graph: SpatialGraph, params: LayoutParams = LayoutParams(),
              init=None) -> Layout2D:
    """Minimize the stress in continuous 2D, starting from ``init`` or ``params.init``.

    Every accepted step lowers the stress (Armijo backtracking). The search
    direction is the gradient scaled per vertex by ``sum_j 2 / s_ij**2``.
    Stops once the relative improvement stays below ``convergence_tol`` for
    ``patience`` consecutive steps; hitting ``max_iters`` first returns the
    current layout with ``converged=False``.
    """
    n = graph.vertex_count
    if n == 1:
        return Layout2D(np.zeros((1, 2)), stress_history=(0.0,), converged=True)
    if init is not None:
        X = np.array(_coords(init), dtype=np.float64)
        fr_iters = 0
    elif params.init == "fr":
        X = _random_start(n, params.seed)
        fr_iters = FR_ITERS
    else:
        X = np.ascontiguousarray(initial_layout(graph, params))
        fr_iters = 0
    if X.shape != (n, 2):
        raise InvalidArgumentError("initial layout has the wrong shape")
    eu, ev = _edge_lists(graph)
    history = np.empty(params.max_iters + 1)
    count, converged = _kernels.spring_layout(
        X, graph.distances, eu, ev, fr_iters, FR_START_TEMP * np.sqrt(n),
        params.max_iters, params.convergence_tol, params.patience, history)
    if not converged:
        log.warning("layout of %d vertices stopped at max_iters=%d", n, params.max_iters)
    return Layout2D(X, stress_history=tuple(history[:count].tolist()), converged=converged)
