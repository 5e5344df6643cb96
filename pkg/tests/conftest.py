import numpy as np
import pytest

from gridembed.graph import shortest_path_distances
from gridembed.types import SpatialGraph

_ACCEPTANCE: list = []


@pytest.fixture
def record():
    """Log one acceptance line: ``record(number, passed, detail)``."""

    def _record(number, passed, detail):
        _ACCEPTANCE.append((number, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}: {detail}")


def graph_from_edges(edges, n):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    d, _ = shortest_path_distances(edges, n)
    return SpatialGraph(n, edges, d)


def random_connected_edges(n, rng, extra=0.1):
    """Random spanning tree plus a sprinkle of extra edges."""
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(k)])
        edges.add((min(a, b), max(a, b)))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < extra:
                edges.add((i, j))
    return np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)


def floyd_warshall(edges, n):
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0)
    for a, b in edges:
        d[a, b] = d[b, a] = 1
    for k in range(n):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return d


def naive_stress(X, D):
    total = 0.0
    n = len(X)
    for i in range(n):
        for j in range(i + 1, n):
            dist = np.hypot(X[i][0] - X[j][0], X[i][1] - X[j][1])
            total += (dist / D[i][j] - 1.0) ** 2
    return total


def circumsphere(tet):
    """Center and radius of the sphere through four 3D points."""
    a = tet[0]
    A = 2 * (tet[1:] - a)
    b = np.sum(tet[1:] ** 2 - a ** 2, axis=1)
    c = np.linalg.solve(A, b)
    return c, np.linalg.norm(c - a)
