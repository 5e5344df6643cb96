import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse.csgraph import connected_components
from scipy.sparse import coo_matrix

from conftest import circumsphere, floyd_warshall, random_connected_edges
from gridembed.graph import (DELAUNAY, EUCLIDEAN, build_graph, delaunay_edges, delaunay_simplices,
                             euclidean_distances, knn_edges, knn_mode, shortest_path_distances)
from gridembed.types import InvalidArgumentError


def connected(edges, n):
    e = np.asarray(edges).reshape(-1, 2)
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
    return connected_components(adj, directed=False)[0] == 1


def test_tetrahedron_gives_complete_graph():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    e = delaunay_edges(pts)
    assert e.tolist() == [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]


def test_three_points_form_a_triangle():
    pts = np.array([[0, 0, 0], [2, 0, 0], [0, 1, 1]], dtype=float)
    simp, dim = delaunay_simplices(pts)
    assert dim == 2
    assert delaunay_edges(pts).tolist() == [[0, 1], [0, 2], [1, 2]]


def test_collinear_points_form_a_path():
    pts = np.array([[3, 0, 0], [0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
    assert delaunay_edges(pts).tolist() == [[0, 3], [1, 2], [2, 3]]


def test_coplanar_cloud_is_connected():
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(size=(30, 2)), np.zeros(30)])
    e = delaunay_edges(pts)
    assert connected(e, 30)


def test_duplicates_stay_connected():
    rng = np.random.default_rng(1)
    pts = rng.uniform(size=(15, 3))
    pts = np.vstack([pts, pts[:3]])
    assert connected(delaunay_edges(pts), 18)
    g = build_graph(np.zeros((5, 3)), DELAUNAY)
    assert not g.disconnected and g.edges.shape[0] == 4


def test_empty_circumsphere_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(10):
        pts = rng.uniform(size=(20, 3))
        simp, dim = delaunay_simplices(pts)
        assert dim == 3
        tol = 1e-9 * np.linalg.norm(pts.max(0) - pts.min(0))
        for tet in simp:
            c, r = circumsphere(pts[tet])
            others = np.setdiff1d(np.arange(20), tet)
            assert np.all(np.linalg.norm(pts[others] - c, axis=1) >= r - tol)


def test_delaunay_needs_two_points():
    with pytest.raises(InvalidArgumentError):
        delaunay_simplices(np.zeros((1, 3)))


def brute_knn(pts, k):
    n = len(pts)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    pairs = set()
    for i in range(n):
        order = [j for j in np.argsort(d[i], kind="stable") if j != i][:k]
        for j in order:
            pairs.add((min(i, j), max(i, j)))
    return sorted(pairs)


def test_knn_line_example():
    pts = np.array([[0, 0, 0], [1, 0, 0], [3, 0, 0], [7, 0, 0]], dtype=float)
    # 0->1, 1->0, 2->1, 3->2
    assert knn_edges(pts, 1).tolist() == [[0, 1], [1, 2], [2, 3]]


def test_knn_matches_brute_force():
    rng = np.random.default_rng(3)
    for k in (1, 3, 7):
        pts = rng.normal(size=(40, 3))
        assert [tuple(e) for e in knn_edges(pts, k).tolist()] == brute_knn(pts, k)


def test_knn_bounds():
    with pytest.raises(InvalidArgumentError):
        knn_edges(np.zeros((3, 3)), 3)
    g = build_graph(np.random.default_rng(0).normal(size=(5, 3)), knn_mode(20))
    assert g.edges.shape[0] == 10


def test_bfs_path_example():
    d, disc = shortest_path_distances([[0, 1], [1, 2], [2, 3]], 4)
    assert not disc
    np.testing.assert_array_equal(d, np.abs(np.subtract.outer(np.arange(4), np.arange(4))))


def test_bfs_disconnected_gets_max_plus_one():
    d, disc = shortest_path_distances([[0, 1], [1, 2]], 4)
    assert disc
    assert d[0, 3] == 3 and d[3, 0] == 3 and d[0, 2] == 2


def test_bfs_matches_floyd_warshall():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(2, 40))
        e = random_connected_edges(n, rng, 0.05)
        d, disc = shortest_path_distances(e, n)
        assert not disc
        np.testing.assert_array_equal(d, floyd_warshall(e, n))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 10**6))
def test_bfs_is_a_metric(n, seed):
    rng = np.random.default_rng(seed)
    d, _ = shortest_path_distances(random_connected_edges(n, rng, 0.1), n)
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0) and np.all(d[~np.eye(n, dtype=bool)] >= 1)
    for k in range(n):
        assert np.all(d <= d[:, k:k + 1] + d[k:k + 1, :])


def test_euclidean_example():
    pts = np.array([[0, 0, 0], [0.5, 0, 0], [0.5, 1.5, 0]])
    d, dup = euclidean_distances(pts)
    assert dup == 0
    np.testing.assert_allclose(d[0, 1], 1.0)
    np.testing.assert_allclose(d[1, 2], 3.0)
    np.testing.assert_allclose(d[0, 2], np.sqrt(0.25 + 2.25) / 0.5)


def test_euclidean_duplicates_set_to_one():
    d, dup = euclidean_distances(np.array([[0, 0, 0], [0, 0, 0], [2, 0, 0]], dtype=float))
    assert dup == 1 and d[0, 1] == 1.0 and d[0, 2] == 1.0


def test_euclidean_matches_double_loop():
    pts = np.random.default_rng(5).uniform(size=(25, 3))
    raw = np.zeros((25, 25))
    for i in range(25):
        for j in range(25):
            raw[i, j] = np.sqrt(sum((pts[i][a] - pts[j][a]) ** 2 for a in range(3)))
    raw /= raw[raw > 0].min()
    d, _ = euclidean_distances(pts)
    np.testing.assert_allclose(d, raw, rtol=1e-12)
    g = build_graph(pts, EUCLIDEAN)
    assert g.edges.shape == (0, 2)


def test_single_point_graph():
    g = build_graph(np.zeros((1, 3)))
    assert g.vertex_count == 1 and g.distances.shape == (1, 1)
