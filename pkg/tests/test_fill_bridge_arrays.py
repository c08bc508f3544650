import math

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from shapeforge.dsl.types import (
    CircleTrajectory,
    LineTrajectory,
    PrimitiveKind,
    SimilarityTransform,
)
from shapeforge.errors import DegenerateBasis, GeometryError, LoopCountMismatch, NonSimpleProjection
from shapeforge.geometry import (
    array_1d,
    array_2d,
    bridge_loops,
    fill_grid,
    make_primitive,
    mesh_volume,
    signed_volume,
    transform_mesh,
)
from shapeforge.metrics import chamfer_l2, voxelize_solid
from shapeforge.pointcloud import sample_surface


def _circle_loop(z, r=1.0, n=48):
    ang = 2 * np.pi * np.arange(n) / n
    return np.column_stack([r * np.cos(ang), r * np.sin(ang), np.full(n, z)])


# --- fill grid ---------------------------------------------------------------


def test_fill_unit_square_slab():
    m = fill_grid([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)], 0.2)
    assert m.watertight
    assert abs(mesh_volume(m) - 0.2) < 1e-6


def test_fill_l_shape_volume_is_area_times_thickness():
    boundary = [(0, 0, 0), (2, 0, 0), (2, 1, 0), (1, 1, 0), (1, 2, 0), (0, 2, 0)]
    t = 0.3
    m = fill_grid(boundary, t)
    assert abs(mesh_volume(m) - 3.0 * t) < 1e-6


def test_fill_saddle_quad_against_voxel_oracle():
    # non-planar boundary: z alternates; projected square has area 4
    h = 0.2
    boundary = [(-1, -1, h), (1, -1, -h), (1, 1, h), (-1, 1, -h)]
    t = 0.3
    m = fill_grid(boundary, t)
    assert m.watertight
    vol = mesh_volume(m)
    expected = 4.0 * t
    assert abs(vol - expected) / expected < 0.05
    grid = voxelize_solid(m, 64)
    lo, hi = np.asarray(grid.frame[0]), np.asarray(grid.frame[1])
    cell = np.prod((hi - lo) / 64)
    assert abs(grid.occupied_count * cell - vol) / vol < 0.05


def test_fill_rejects_bowtie_projection():
    with pytest.raises(NonSimpleProjection):
        fill_grid([(0, 0, 0), (1, 1, 0), (1, 0, 0), (0, 1, 0)], 0.1)


# --- bridge loops -------------------------------------------------------------


def test_bridge_two_circles_is_cylinder():
    m = bridge_loops([_circle_loop(-1.0), _circle_loop(1.0)])
    cyl = make_primitive(PrimitiveKind("cylinder", segments=48))
    a = sample_surface(m, 15000, 1).points
    b = sample_surface(cyl, 15000, 2).points
    assert chamfer_l2(a, b) <= 1e-3
    assert m.watertight


def test_bridge_duplicate_loop_rejected():
    with pytest.raises(GeometryError):
        bridge_loops([_circle_loop(0.0), _circle_loop(0.0)])


def test_bridge_needs_two_loops():
    with pytest.raises(LoopCountMismatch):
        bridge_loops([_circle_loop(0.0)])


def test_bridge_circle_to_square_volume_bounds():
    n = 64
    square = np.array(
        [[1.0, -1.0, 1.0], [1.0, 1.0, 1.0], [-1.0, 1.0, 1.0], [-1.0, -1.0, 1.0]]
    )
    m = bridge_loops([_circle_loop(-1.0, n=n), square])
    assert m.watertight
    vol = mesh_volume(m)
    cyl_vol = 2 * 0.5 * n * math.sin(2 * math.pi / n)  # inscribed prism on circle
    box_vol = 2 * 4.0
    assert cyl_vol <= vol <= box_vol


def test_bridge_invariant_under_cyclic_relabeling():
    a, b = _circle_loop(-1.0), _circle_loop(1.0)
    m1 = bridge_loops([a, b])
    m2 = bridge_loops([np.roll(a, 17, axis=0), np.roll(b, 5, axis=0)])
    assert np.array_equal(m1.vertices, m2.vertices)
    assert np.array_equal(m1.triangles, m2.triangles)


def test_bridge_three_loops_watertight():
    sq = np.array([[0.6, -0.6, 0.0], [0.6, 0.6, 0.0], [-0.6, 0.6, 0.0], [-0.6, -0.6, 0.0]])
    m = bridge_loops([_circle_loop(-1.0, 0.8), sq, _circle_loop(1.0, 0.5)])
    assert m.watertight
    assert mesh_volume(m) > 0


# --- arrays --------------------------------------------------------------------


def _small_cube():
    return transform_mesh(
        make_primitive(PrimitiveKind("cube")), SimilarityTransform(scale=(0.1, 0.1, 0.1))
    )


def test_array_1d_single_instance_at_start():
    proto = _small_cube()
    m = array_1d(proto, LineTrajectory((1, 2, 3), (4, 2, 3)), 1)
    assert len(m.vertices) == len(proto.vertices)
    assert np.allclose(m.vertices.mean(axis=0), [1, 2, 3], atol=1e-12)


def test_array_1d_line_equidistant_centroids():
    m = array_1d(_small_cube(), LineTrajectory((0, 0, 0), (3, 0, 0)), 4)
    groups = m.vertices.reshape(4, -1, 3)
    centroids = groups.mean(axis=1)
    assert np.allclose(centroids[:, 0], [0, 1, 2, 3], atol=1e-12)


def test_array_1d_closed_circle_six_fold_symmetry():
    m = array_1d(_small_cube(), CircleTrajectory((0, 0, 0), (0, 0, 1), 1.0), 6)
    v = m.vertices.reshape(6, -1, 3)
    ang = 2 * math.pi / 6
    rot = np.array(
        [[math.cos(ang), -math.sin(ang), 0], [math.sin(ang), math.cos(ang), 0], [0, 0, 1]]
    )
    for k in range(5):
        assert np.abs(v[k] @ rot.T - v[k + 1]).max() < 1e-9


def test_array_2d_identity_placement():
    proto = _small_cube()
    m = array_2d(proto, (1, 0, 0), (0, 1, 0), (1, 1), (0.5, 0.5))
    assert np.array_equal(m.vertices, proto.vertices)


def test_array_2d_component_count_and_vertices():
    sphere = transform_mesh(
        make_primitive(PrimitiveKind("uv_sphere", segments=12, rings=6)),
        SimilarityTransform(scale=(0.1, 0.1, 0.1)),
    )
    m = array_2d(sphere, (1, 0, 0), (0, 1, 0), (2, 3), (0.8, 0.8))
    assert len(m.vertices) == 6 * len(sphere.vertices)
    edges = np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]]])
    graph = coo_matrix(
        (np.ones(len(edges)), (edges[:, 0], edges[:, 1])),
        shape=(len(m.vertices), len(m.vertices)),
    )
    n_comp, _ = connected_components(graph, directed=False)
    assert n_comp == 6
    assert m.watertight  # disjoint spacing keeps instances manifold


def test_array_2d_overlapping_instances_flagged():
    m = array_2d(_small_cube(), (1, 0, 0), (0, 1, 0), (2, 1), (0.05, 0.05))
    assert not m.watertight


def test_array_2d_degenerate_basis_rejected():
    with pytest.raises(DegenerateBasis):
        array_2d(_small_cube(), (1, 0, 0), (2, 0, 0), (2, 2), (0.5, 0.5))
