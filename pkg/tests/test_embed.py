import numpy as np
import pytest

from gridembed.embed import PipelineConfig, project, run_pipeline, unproject
from gridembed.graph import EUCLIDEAN
from gridembed.synthetic import blob_cloud, part_cloud
from gridembed.types import EMPTY_LABEL, CapacityError, InvalidArgumentError, PointCloud


def test_default_2048_fills_2048_pixels():
    cloud = part_cloud(2048, seed=0)
    image, report = run_pipeline(cloud)
    assert image.shape == (256, 256)
    assert image.features.shape == (256, 256, 3)
    assert int(image.occupied().sum()) == 2048
    assert len({tuple(p) for p in image.pixel_of_point.tolist()}) == 2048
    np.testing.assert_array_equal(
        image.features[image.pixel_of_point[:, 0], image.pixel_of_point[:, 1]], cloud.points)
    assert report.occupancy == pytest.approx(2048 / 256 ** 2)
    assert set(report.stage_seconds) == {"clustering", "triangulation", "layout",
                                         "discretization", "assembly"}


def test_single_point_single_level():
    image = project(PointCloud([[1.0, 2.0, 3.0]], labels=[5]), PipelineConfig(levels=1))
    assert image.shape == (16, 16)
    assert int(image.occupied().sum()) == 1
    r, c = image.pixel_of_point[0]
    assert image.mask[r, c] == 5
    assert (image.mask == EMPTY_LABEL).sum() == 255


def test_blobs_land_in_their_own_patch():
    centers = [[0, 0, 0], [10, 0, 0], [0, 10, 0], [0, 0, 10]]
    cloud = blob_cloud(400, centers, spread=0.3, seed=1)
    image = project(cloud, PipelineConfig(clusters=4))
    patch = image.pixel_of_point // 16
    for k in range(4):
        cells = {tuple(p) for p in patch[cloud.labels == k].tolist()}
        assert len(cells) == 1
    assert len({tuple(p) for p in patch.tolist()}) == 4


def test_three_levels_nested_extent():
    cloud = part_cloud(512, seed=2)
    cfg = PipelineConfig(levels=3, clusters=(8, 8), lower_grid=(8, 8), higher_grid=(4, 4))
    image = project(cloud, cfg)
    assert image.shape == (128, 128)
    assert len({tuple(p) for p in image.pixel_of_point.tolist()}) == 512


def test_repair_records_final_pixels():
    cloud = part_cloud(256, seed=3)
    image = project(cloud, PipelineConfig(levels=1))
    assert image.collisions
    for rec in image.collisions:
        assert rec.resolved
        assert tuple(image.pixel_of_point[rec.representative]) == rec.pixel
        for pt, fp in zip(rec.colliding, rec.final_pixels):
            assert tuple(image.pixel_of_point[pt]) == fp


def test_analysis_mode_shares_pixels_and_unprojects():
    cloud = part_cloud(200, seed=4)
    image, report = run_pipeline(cloud, PipelineConfig(levels=1, repair_collisions=False))
    image.validate()
    assert image.collisions and report.pixel_sharing_points > 0
    labels = unproject(image, image.mask)
    for rec in image.collisions:
        assert not rec.resolved
        for pt in rec.colliding:
            assert tuple(image.pixel_of_point[pt]) == rec.pixel
            assert labels[pt] == cloud.labels[rec.representative]
            np.testing.assert_array_equal(image.features[rec.pixel],
                                          cloud.points[rec.representative])
    solo = np.ones(200, dtype=bool)
    for rec in image.collisions:
        solo[list(rec.colliding)] = False
    np.testing.assert_array_equal(labels[solo], cloud.labels[solo])


def test_unproject_roundtrip_and_shape_check():
    cloud = part_cloud(1000, seed=5)
    image = project(cloud)
    np.testing.assert_array_equal(unproject(image, image.mask), cloud.labels)
    with pytest.raises(InvalidArgumentError):
        unproject(image, np.zeros((10, 10)))


def test_deterministic_for_fixed_seed():
    cloud = part_cloud(600, seed=6)
    a = project(cloud, PipelineConfig(seed=9))
    b = project(cloud, PipelineConfig(seed=9))
    np.testing.assert_array_equal(a.pixel_of_point, b.pixel_of_point)
    np.testing.assert_array_equal(a.features, b.features)


def test_euclidean_mode_and_normalized_features():
    cloud = part_cloud(300, seed=7)
    image = project(cloud, PipelineConfig(graph_mode=EUCLIDEAN, clusters=0,
                                          normalize_features=True))
    vals = image.features[image.pixel_of_point[:, 0], image.pixel_of_point[:, 1]]
    assert np.linalg.norm(vals, axis=1).max() == pytest.approx(1.0)


def test_capacity_error_names_cluster():
    with pytest.raises(CapacityError, match="cluster 0 at level 1"):
        project(part_cloud(300, seed=0), PipelineConfig(levels=1))


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        PipelineConfig(levels=0)
    with pytest.raises(InvalidArgumentError):
        PipelineConfig(levels=3, clusters=(4,))
    assert PipelineConfig(clusters=0).per_level_k(2048) == [45]
    assert PipelineConfig(levels=3, clusters=5).per_level_k(1000) == [5, 5]
