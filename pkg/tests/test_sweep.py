import math

import numpy as np
import pytest

from shapeforge.dsl.types import (
    CircleSection,
    CircleTrajectory,
    LineTrajectory,
    PrimitiveKind,
    RectangleSection,
)
from shapeforge.errors import SectionCrossesAxis
from shapeforge.geometry import (
    ScaleProfile,
    eval_section,
    make_primitive,
    mesh_volume,
    revolve,
    sweep,
)
from shapeforge.metrics import chamfer_l2
from shapeforge.pointcloud import sample_surface


def test_sweep_circle_along_line_matches_cylinder():
    m = sweep(
        CircleSection(1.0, resolution=64), LineTrajectory((0, 0, -1), (0, 0, 1))
    )
    cyl = make_primitive(PrimitiveKind("cylinder", segments=64))
    a = sample_surface(m, 20000, 11).points
    b = sample_surface(cyl, 20000, 12).points
    assert chamfer_l2(a, b) <= 1e-3
    assert m.watertight


def test_extrusion_rings_congruent():
    sec = eval_section(CircleSection(0.5, resolution=16))
    m = sweep(
        CircleSection(0.5, resolution=16),
        LineTrajectory((0.2, 0.3, 0.0), (1.0, -0.4, 2.0)),
        trajectory_samples=5,
    )
    rings = m.vertices[: 5 * 16].reshape(5, 16, 3)
    edges = np.diff(rings, axis=1)
    lengths = np.linalg.norm(edges, axis=2)
    assert np.allclose(lengths, lengths[0], atol=1e-12)


def test_frustum_volume_within_one_percent():
    profile = ScaleProfile.from_pairs([(0, 1.0), (1, 0.5)])
    m = sweep(
        CircleSection(1.0, resolution=64),
        LineTrajectory((0, 0, 0), (0, 0, 2)),
        profile,
    )
    expected = math.pi * 2 * (1 + 0.5 + 0.25) / 3
    assert abs(mesh_volume(m) - expected) / expected < 0.01


def test_torus_volume_pappus():
    m = sweep(
        CircleSection(0.25, resolution=96),
        CircleTrajectory((0, 0, 0), (0, 0, 1), 1.0, resolution=192),
    )
    expected = 2 * math.pi**2 * 1.0 * 0.25**2
    assert abs(mesh_volume(m) - expected) / expected < 0.01
    assert m.watertight


def test_revolve_washer_volume():
    m = revolve(RectangleSection(0.5, 2.0), offset=(1.0, 0.0), steps=256)
    expected = math.pi * (1.25**2 - 0.75**2) * 2
    assert abs(mesh_volume(m) - expected) / expected < 0.01


def test_full_revolution_is_rotation_symmetric():
    steps = 32
    m = revolve(CircleSection(0.3, resolution=24), offset=(1.0, 0.0), steps=steps)
    ang = 2 * math.pi / steps
    rot = np.array(
        [[math.cos(ang), -math.sin(ang), 0], [math.sin(ang), math.cos(ang), 0], [0, 0, 1]]
    )
    rotated = m.vertices @ rot.T
    key = lambda v: set(map(tuple, np.round(v, 9)))
    assert key(rotated) == key(m.vertices)


def test_partial_revolution_watertight_with_caps():
    m = revolve(CircleSection(0.3, resolution=24), offset=(1.0, 0.0), angle=math.pi, steps=48)
    assert m.watertight
    assert mesh_volume(m) > 0


def test_revolve_section_on_axis_rejected():
    with pytest.raises(SectionCrossesAxis):
        revolve(CircleSection(0.5), offset=(0.2, 0.0))


def test_sweep_closed_trajectory_has_no_caps():
    m = sweep(
        CircleSection(0.2, resolution=12),
        CircleTrajectory((0, 0, 0), (0, 0, 1), 1.0, resolution=48),
    )
    # Euler characteristic of a torus is 0: V - E + F = 0
    v = len(m.vertices)
    f = len(m.triangles)
    e = f * 3 // 2
    assert v - e + f == 0
