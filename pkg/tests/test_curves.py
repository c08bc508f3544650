import math

import numpy as np
import pytest

from oracles import shoelace_area
from shapeforge.dsl.types import (
    ArcSection,
    BezierSection,
    CircleSection,
    CircleTrajectory,
    LineTrajectory,
    PolygonSection,
    PolylineTrajectory,
    RectangleSection,
)
from shapeforge.errors import DegenerateTangent, SelfIntersection
from shapeforge.geometry import ScaleProfile, eval_section, eval_trajectory


def test_circle_section_four_samples_is_inscribed_square():
    pts = eval_section(CircleSection(1.0), n=4)
    expected = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert np.allclose(pts, expected, atol=1e-12)


def test_rectangle_section_corners_ccw():
    pts = eval_section(RectangleSection(2.0, 1.0))
    assert sorted(map(tuple, pts)) == [(-1.0, -0.5), (-1.0, 0.5), (1.0, -0.5), (1.0, 0.5)]
    assert shoelace_area(pts) > 0


def test_bezier_closed_loop_positive_area():
    pts = eval_section(BezierSection(((1, 0), (0, 1), (-1, 0), (0, -1)), closed=True), n=8)
    assert shoelace_area(pts) > 0


def test_arc_section_chord_vs_pie():
    chord = eval_section(ArcSection(1.0, 0.0, math.pi, chord_closed=True), n=16)
    pie = eval_section(ArcSection(1.0, 0.0, math.pi, chord_closed=False), n=16)
    assert len(pie) == len(chord) + 1
    assert any(np.allclose(p, [0, 0]) for p in pie)


def test_self_intersecting_polygon_raises():
    with pytest.raises(SelfIntersection):
        eval_section(PolygonSection(((0, 0), (1, 1), (1, 0), (0, 1))))


def test_sections_are_ccw_even_from_cw_input():
    cw = PolygonSection(((0, 0), (0, 1), (1, 1), (1, 0)))
    pts = eval_section(cw)
    assert shoelace_area(pts) > 0


# --- trajectories / frames --------------------------------------------------------


def test_line_two_samples_constant_tangent():
    f = eval_trajectory(LineTrajectory((0, 0, 0), (0, 0, 2)), m=2)
    assert len(f) == 2
    assert np.allclose(f.tangents, [[0, 0, 1], [0, 0, 1]])
    assert not f.closed


def test_frames_orthonormal():
    f = eval_trajectory(
        CircleTrajectory((0.3, -0.2, 0.5), (1.0, 2.0, 0.5), 0.8, resolution=48)
    )
    for i in range(len(f)):
        t, n, b = f.tangents[i], f.normals[i], f.binormals[i]
        assert abs(np.linalg.norm(t) - 1) < 1e-9
        assert abs(np.linalg.norm(n) - 1) < 1e-9
        assert abs(np.dot(t, n)) < 1e-9
        assert np.allclose(np.cross(t, n), b, atol=1e-9)


def test_circle_frames_close_and_tangents_perpendicular_to_radius():
    center = np.array([0.0, 0.0, 0.0])
    f = eval_trajectory(CircleTrajectory((0, 0, 0), (0, 0, 1), 1.0, resolution=64))
    radial = f.positions - center
    assert np.abs(np.einsum("ij,ij->i", radial, f.tangents)).max() < 1e-9
    # closure: propagate one more step; first and last frames coincide
    assert np.abs(f.normals[0] - f.normals[-1]).max() < 0.1  # same ring, adjacent
    # distributed twist keeps all normals equal to the axis here
    assert np.abs(f.normals - np.array([0, 0, 1.0])).max() < 1e-9


def test_polyline_right_angle_no_flip():
    f = eval_trajectory(PolylineTrajectory(((0, 0, 0), (1, 0, 0), (1, 1, 0))))
    dots = np.einsum("ij,ij->i", f.normals[:-1], f.normals[1:])
    assert np.all(dots > 0)


def test_consecutive_frame_rotation_below_right_angle():
    f = eval_trajectory(
        PolylineTrajectory(((0, 0, 0), (1, 0, 0), (1.5, 0.9, 0.2), (1.2, 1.8, 0.9)))
    )
    for i in range(len(f) - 1):
        cosang = np.dot(f.normals[i], f.normals[i + 1])
        assert cosang > math.cos(math.pi / 2)


def test_degenerate_tangent_raises():
    with pytest.raises(DegenerateTangent):
        eval_trajectory(PolylineTrajectory(((0, 0, 0), (0, 0, 0), (1, 0, 0))))


def test_scale_profile_interpolation_and_clamping():
    prof = ScaleProfile.from_pairs([(0.2, 2.0), (0.8, 4.0)])
    assert prof(0.0) == 2.0  # clamped start
    assert prof(1.0) == 4.0  # clamped end
    assert prof(0.5) == pytest.approx(3.0)
    assert ScaleProfile.from_pairs([(0, 1), (1, 1)]).is_constant()
