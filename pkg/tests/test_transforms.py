import math

import numpy as np
import pytest

from shapeforge.dsl import retarget_statement
from shapeforge.dsl.types import (
    CircleSection,
    LineTrajectory,
    PartStatement,
    PrimitiveKind,
    PrimitiveOp,
    SimilarityTransform,
    TranslationOp,
)
from shapeforge.errors import NonUniformRescaleOfRotated
from shapeforge.geometry import execute_op, transform_mesh
from shapeforge.metrics import chamfer_l2
from shapeforge.pointcloud import sample_surface
from shapeforge.transforms import (
    compose,
    invert,
    quat_from_axis_angle,
    quat_mul,
    quat_to_matrix,
    transform_points,
)


def _assert_transforms_close(a, b, tol=1e-12):
    assert np.allclose(a.location, b.location, atol=tol)
    assert np.allclose(a.scale, b.scale, atol=tol)
    qa, qb = np.asarray(a.rotation), np.asarray(b.rotation)
    assert min(np.abs(qa - qb).max(), np.abs(qa + qb).max()) < 1e-9


def test_compose_with_identity():
    t = SimilarityTransform((1, 2, 3), quat_from_axis_angle((0, 0, 1), 0.7), (2, 2, 2))
    _assert_transforms_close(compose(SimilarityTransform(), t), t)
    _assert_transforms_close(compose(t, SimilarityTransform()), t)


def test_compose_matches_pointwise_application():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(50, 3))
    outer = SimilarityTransform(
        (0.3, -0.2, 1.0), quat_from_axis_angle((1, 2, 3), 0.9), (1.7, 1.7, 1.7)
    )
    inner = SimilarityTransform(
        (-1.0, 0.5, 0.2), quat_from_axis_angle((0, 1, -1), -0.4), (0.5, 2.0, 1.2)
    )
    combo = compose(outer, inner)
    direct = transform_points(transform_points(pts, inner), outer)
    assert np.allclose(transform_points(pts, combo), direct, atol=1e-12)


def test_compose_anisotropic_over_axis_aligned_rotation():
    rng = np.random.default_rng(6)
    pts = rng.normal(size=(20, 3))
    inner = SimilarityTransform(
        (0.1, 0.2, 0.3), quat_from_axis_angle((0, 0, 1), math.pi / 2), (1.0, 1.0, 1.0)
    )
    outer = SimilarityTransform((0, 0, 0), (1, 0, 0, 0), (2.0, 3.0, 4.0))
    combo = compose(outer, inner)
    direct = transform_points(transform_points(pts, inner), outer)
    assert np.allclose(transform_points(pts, combo), direct, atol=1e-9)


def test_compose_anisotropic_over_generic_rotation_raises():
    inner = SimilarityTransform(rotation=quat_from_axis_angle((1, 1, 0), 0.3))
    outer = SimilarityTransform(scale=(1.0, 2.0, 3.0))
    with pytest.raises(NonUniformRescaleOfRotated):
        compose(outer, inner)


def test_invert_uniform():
    t = SimilarityTransform((1, -2, 0.5), quat_from_axis_angle((3, 1, 2), 1.1), (0.7, 0.7, 0.7))
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(30, 3))
    back = transform_points(transform_points(pts, t), invert(t))
    assert np.allclose(back, pts, atol=1e-12)


def test_invert_anisotropic_axis_aligned():
    t = SimilarityTransform(
        (0.5, 0, -1), quat_from_axis_angle((1, 0, 0), math.pi / 2), (2.0, 0.5, 3.0)
    )
    rng = np.random.default_rng(8)
    pts = rng.normal(size=(30, 3))
    back = transform_points(transform_points(pts, t), invert(t))
    assert np.allclose(back, pts, atol=1e-9)


def test_quat_mul_matches_matrix_product():
    qa = quat_from_axis_angle((1, 2, -1), 0.8)
    qb = quat_from_axis_angle((0, 1, 1), -1.3)
    assert np.allclose(
        quat_to_matrix(quat_mul(qa, qb)), quat_to_matrix(qa) @ quat_to_matrix(qb), atol=1e-12
    )


# --- retargeting -----------------------------------------------------------------


def _cube_statement(loc=(0.0, 0.0, 0.0)):
    return PartStatement(
        "body", 0, PrimitiveOp(PrimitiveKind("cube"), SimilarityTransform(location=loc))
    )


def test_retarget_identity_is_identity():
    s = _cube_statement()
    assert retarget_statement(s, SimilarityTransform()) == s


def test_retarget_translation_moves_location():
    s = _cube_statement()
    out = retarget_statement(s, SimilarityTransform(location=(1, 2, 3)))
    assert out.op.transform.location == (1.0, 2.0, 3.0)
    assert out.op.transform.rotation == (1.0, 0.0, 0.0, 0.0)
    assert out.op.transform.scale == (1.0, 1.0, 1.0)


def test_retarget_rigid_matches_mesh_transform_vertexwise():
    s = PartStatement(
        "p",
        0,
        PrimitiveOp(
            PrimitiveKind("cylinder"),
            SimilarityTransform((0.2, 0.1, -0.3), quat_from_axis_angle((1, 1, 1), 0.5), (1, 1, 1)),
        ),
    )
    t = SimilarityTransform((0.5, -1.0, 2.0), quat_from_axis_angle((0, 1, 0), 1.2), (1, 1, 1))
    direct = transform_mesh(execute_op(s.op), t)
    via_code = execute_op(retarget_statement(s, t).op)
    assert np.abs(direct.vertices - via_code.vertices).max() < 1e-9


def test_retarget_swept_part_uniform_scale_cd():
    op = TranslationOp(
        section=CircleSection(0.5, resolution=32),
        trajectory=LineTrajectory((0, 0, -1), (0.3, 0.2, 1)),
    )
    s = PartStatement("tube", 0, op)
    t = SimilarityTransform(scale=(2.0, 2.0, 2.0))
    scaled = execute_op(retarget_statement(s, t).op)
    reference = transform_mesh(execute_op(op), t)
    a = sample_surface(scaled, 5000, 3).points
    b = sample_surface(reference, 5000, 3).points
    assert chamfer_l2(a, b) <= 1e-6


def test_retarget_composes_for_uniform_scales():
    op = TranslationOp(
        section=CircleSection(0.4, resolution=24),
        trajectory=LineTrajectory((0, 0, 0), (0, 0, 1.5)),
    )
    s = PartStatement("tube", 0, op)
    t1 = SimilarityTransform((0.5, 0, 0), quat_from_axis_angle((0, 1, 0), 0.4), (1.5, 1.5, 1.5))
    t2 = SimilarityTransform((0, -0.2, 0.3), quat_from_axis_angle((1, 0, 0), -0.8), (0.7, 0.7, 0.7))
    two_step = execute_op(retarget_statement(retarget_statement(s, t1), t2).op)
    one_step = execute_op(retarget_statement(s, compose(t2, t1)).op)
    a = sample_surface(two_step, 4000, 5).points
    b = sample_surface(one_step, 4000, 5).points
    assert chamfer_l2(a, b) <= 1e-6
