import math

import numpy as np
import pytest

from shapeforge.dsl.types import PrimitiveKind, SimilarityTransform
from shapeforge.errors import DegenerateExtent, EmptyMesh
from shapeforge.geometry import empty_mesh, make_mesh, make_primitive, transform_mesh
from shapeforge.metrics import chamfer_l2
from shapeforge.pointcloud import (
    AugmentConfig,
    PointCloud,
    augment,
    load_cloud,
    normalize_to_unit_cube,
    sample_surface,
    save_cloud,
)
from shapeforge.transforms import transform_points


def test_single_triangle_samples_in_plane():
    tri = make_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
    pc = sample_surface(tri, 1000, 0)
    assert np.abs(pc.points[:, 2]).max() < 1e-12
    assert np.all(pc.points[:, 0] >= -1e-12)
    assert np.all(pc.points[:, 1] >= -1e-12)
    assert np.all(pc.points.sum(axis=1) <= 1 + 1e-12)


def test_cube_face_counts_proportional_to_area():
    cube = make_primitive(PrimitiveKind("cube"))
    n = 60000
    pc = sample_surface(cube, n, 1)
    for axis in range(3):
        for side in (-1.0, 1.0):
            count = int(np.sum(np.abs(pc.points[:, axis] - side) < 1e-9))
            assert abs(count - n / 6) < 0.01 * n


def test_same_seed_identical_clouds():
    cube = make_primitive(PrimitiveKind("cube"))
    a = sample_surface(cube, 5000, 42)
    b = sample_surface(cube, 5000, 42)
    assert np.array_equal(a.points, b.points)


def test_prefix_property():
    cube = make_primitive(PrimitiveKind("cube"))
    small = sample_surface(cube, 1000, 7)
    big = sample_surface(cube, 4000, 7)
    assert np.array_equal(big.points[:1000], small.points)


def test_empty_mesh_rejected():
    with pytest.raises(EmptyMesh):
        sample_surface(empty_mesh(), 10, 0)


def test_normalize_identity_when_already_unit():
    cube = make_primitive(PrimitiveKind("cube"))
    pc = PointCloud(cube.vertices.copy())
    out, t = normalize_to_unit_cube(pc)
    assert np.allclose(out.points, pc.points, atol=1e-12)
    assert np.allclose(t.location, 0, atol=1e-12)
    assert np.allclose(t.scale, 1, atol=1e-12)


def test_normalize_unit_cube_from_0_4_box():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 4, size=(5000, 3))
    pts[0] = (0, 0, 0)
    pts[1] = (4, 4, 4)  # pin the bbox corners
    out, t = normalize_to_unit_cube(PointCloud(pts))
    assert t.scale == (0.5, 0.5, 0.5)
    assert np.allclose(t.location, (-1, -1, -1))  # -s * center = (-2,-2,-2) * s
    assert out.points.min() >= -1 - 1e-12
    assert out.points.max() <= 1 + 1e-12
    # round trip through the inverse
    from shapeforge.transforms import invert

    back = transform_points(out.points, invert(t))
    assert np.abs(back - pts).max() < 1e-12


def test_normalize_returns_transform_that_maps_original():
    rng = np.random.default_rng(4)
    pts = rng.normal(2.0, 3.0, size=(500, 3))
    out, t = normalize_to_unit_cube(PointCloud(pts))
    assert np.array_equal(out.points, transform_points(pts, t))


def test_normalize_degenerate_extent():
    with pytest.raises(DegenerateExtent):
        normalize_to_unit_cube(PointCloud(np.zeros((5, 3))))


def test_augment_disabled_is_identity():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(800, 3))
    cfg = AugmentConfig(
        rotation=False, scale_range=(1.0, 1.0), point_count_range=(800, 800), noise_sigma=0.0
    )
    out = augment(PointCloud(pts), cfg, seed=9)
    assert np.array_equal(out.points, pts)


def test_augment_noise_statistics():
    pts = np.zeros((20000, 3))
    sigma = 0.01
    cfg = AugmentConfig(
        rotation=False,
        scale_range=(1.0, 1.0),
        point_count_range=(20000, 20000),
        noise_sigma=sigma,
    )
    out = augment(PointCloud(pts), cfg, seed=11)
    std = out.points.std(axis=0)
    assert np.all(np.abs(std - sigma) < 0.05 * sigma)


def test_augment_rotation_preserves_pairwise_distances():
    rng = np.random.default_rng(6)
    pts = rng.normal(size=(300, 3))
    cfg = AugmentConfig(
        rotation=True, scale_range=(1.0, 1.0), point_count_range=(300, 300), noise_sigma=0.0
    )
    out = augment(PointCloud(pts), cfg, seed=13)
    d_before = np.linalg.norm(pts[:100, None] - pts[None, :100], axis=2)
    d_after = np.linalg.norm(out.points[:100, None] - out.points[None, :100], axis=2)
    assert np.abs(np.sort(d_before.ravel()) - np.sort(d_after.ravel())).max() < 1e-9


def test_augment_same_rotation_preserves_chamfer():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(400, 3))
    b = rng.normal(size=(400, 3))
    cfg = AugmentConfig(
        rotation=True, scale_range=(1.0, 1.0), point_count_range=(400, 400), noise_sigma=0.0
    )
    before = chamfer_l2(a, b)
    out_a = augment(PointCloud(a), cfg, seed=21)
    out_b = augment(PointCloud(b), cfg, seed=21)  # same seed: same rotation
    after = chamfer_l2(out_a.points, out_b.points)
    assert abs(before - after) < 1e-9


def test_augment_resampling_counts():
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(1000, 3))
    cfg = AugmentConfig(
        rotation=False, scale_range=(1.0, 1.0), point_count_range=(64, 256), noise_sigma=0.0
    )
    out = augment(PointCloud(pts), cfg, seed=30)
    assert 64 <= len(out.points) <= 256


def test_cloud_ply_roundtrip_with_provenance(tmp_path):
    cube = make_primitive(PrimitiveKind("cube"))
    pc = sample_surface(cube, 500, 77, source_id="cube_x")
    path = tmp_path / "cloud.ply"
    save_cloud(path, pc)
    back = load_cloud(path)
    assert np.array_equal(back.points, pc.points)
    assert back.source_id == "cube_x"
    assert back.seed == 77
