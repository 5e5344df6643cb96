import numpy as np
import pytest

from gridembed.types import (CloudImage, CollisionRecord, GridLayout, InvalidArgumentError,
                             Layout2D, PointCloud, SpatialGraph)


def test_pointcloud_rejects_nonfinite():
    with pytest.raises(InvalidArgumentError):
        PointCloud([[0, 0, 0], [np.nan, 1, 2]])
    with pytest.raises(InvalidArgumentError):
        PointCloud([[0, 0, np.inf]])


def test_pointcloud_label_length_must_match():
    with pytest.raises(InvalidArgumentError):
        PointCloud(np.zeros((3, 3)), labels=[0, 1])
    with pytest.raises(InvalidArgumentError):
        PointCloud(np.zeros((2, 3)), labels=[0, -1])


def test_pointcloud_is_read_only():
    c = PointCloud(np.eye(3), labels=[0, 1, 2])
    with pytest.raises(ValueError):
        c.points[0, 0] = 5
    assert len(c) == 3 and c.has_labels


def test_spatial_graph_validation():
    d = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float)
    g = SpatialGraph(3, [[0, 1], [1, 2]], d)
    g.validate()
    with pytest.raises(InvalidArgumentError):
        SpatialGraph(3, [[0, 0]], d)
    with pytest.raises(InvalidArgumentError):
        SpatialGraph(3, [[0, 3]], d)
    bad = d.copy()
    bad[0, 2] = 0.5
    bad[2, 0] = 0.5
    with pytest.raises(InvalidArgumentError):
        SpatialGraph(3, [], bad).validate()


def test_layout_and_grid_bounds():
    with pytest.raises(InvalidArgumentError):
        Layout2D([[0, np.nan]])
    with pytest.raises(InvalidArgumentError):
        GridLayout([[0, 16]], (16, 16))
    g = GridLayout([[0, 0], [0, 1]], (2, 2))
    assert g.is_injective()
    assert not GridLayout([[1, 1], [1, 1]], (2, 2)).is_injective()


def test_cloud_image_invariants():
    feats = np.zeros((2, 2, 3))
    pop = np.array([[0, 0], [1, 1], [1, 1]])
    mask = np.array([[0, -1], [-1, 1]])
    rec = CollisionRecord(pixel=(1, 1), representative=1, colliding=(2,))
    CloudImage(feats, mask, pop, (rec,)).validate()

    wrong = CollisionRecord(pixel=(0, 0), representative=1, colliding=(2,))
    with pytest.raises(InvalidArgumentError):
        CloudImage(feats, mask, pop, (wrong,)).validate()
    with pytest.raises(InvalidArgumentError):
        CloudImage(feats, np.array([[0, 0], [-1, 1]]), pop).validate()


def test_collision_record_json_roundtrip():
    rec = CollisionRecord((3, 4), 7, (8, 9), resolved=True, final_pixels=((3, 5), (2, 4)))
    assert CollisionRecord.from_json(rec.to_json()) == rec
