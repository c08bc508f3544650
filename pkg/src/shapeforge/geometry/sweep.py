"""Swept solids: section-along-trajectory sweeps and solids of revolution."""

from __future__ import annotations

import math

import numpy as np

from ..errors import GeometryError, SectionCrossesAxis
from ..geom2d import ear_clip
from .curves import (
    CONSTANT_PROFILE,
    FrameField,
    ScaleProfile,
    arc_lengths,
    eval_section,
    eval_trajectory,
)
from .mesh import Mesh, ensure_outward, make_mesh

FULL_TURN_TOL = 1e-5


def _stitch_rings(
    rings: np.ndarray, closed: bool, cap_start: bool, cap_end: bool, section2d: np.ndarray
) -> Mesh:
    """Build a tube mesh from (k, s, 3) rings; caps triangulate ``section2d``."""
    k, s, _ = rings.shape
    if k < 2:
        raise GeometryError("need at least 2 rings")
    verts = rings.reshape(-1, 3)
    tris: list[list[int]] = []
    pairs: list[list[int]] = []
    ring_count = k if closed else k - 1
    for i in range(ring_count):
        i1 = (i + 1) % k
        base, nxt = i * s, i1 * s
        for j in range(s):
            j1 = (j + 1) % s
            tris.append([base + j, base + j1, nxt + j1])
            tris.append([base + j, nxt + j1, nxt + j])
            pairs.append([len(tris) - 2, len(tris) - 1])
    if not closed:
        cap = ear_clip(section2d)
        if cap_start:
            tris.extend([[b, a, c] for a, b, c in cap])  # reversed: faces -tangent
        if cap_end:
            off = (k - 1) * s
            tris.extend([[off + a, off + b, off + c] for a, b, c in cap])
    mesh = make_mesh(verts, tris, quad_pairs=np.array(pairs))
    return ensure_outward(mesh)


def _place_rings(section2d: np.ndarray, frames: FrameField, scales: np.ndarray) -> np.ndarray:
    """Section points embedded at every frame: x -> normal, y -> binormal."""
    k = len(frames)
    s = len(section2d)
    rings = np.empty((k, s, 3))
    for i in range(k):
        rings[i] = (
            frames.positions[i]
            + scales[i]
            * (
                np.outer(section2d[:, 0], frames.normals[i])
                + np.outer(section2d[:, 1], frames.binormals[i])
            )
        )
    return rings


def sweep(
    section_spec,
    trajectory_spec,
    profile: ScaleProfile = CONSTANT_PROFILE,
    section_samples: int | None = None,
    trajectory_samples: int | None = None,
) -> Mesh:
    """Sweep a section along a trajectory, scaled by the profile over arc length.

    Open trajectories are capped with planar triangulated copies of the
    section; closed trajectories stitch the last ring back to the first.
    Self-intersecting sweeps are not detected.
    """
    section2d = eval_section(section_spec, section_samples)
    frames = eval_trajectory(trajectory_spec, trajectory_samples)
    cum = arc_lengths(frames.positions, closed=False)
    total = cum[-1]
    ts = cum / total if total > 0 else np.linspace(0, 1, len(frames))
    scales = profile(ts)
    rings = _place_rings(section2d, frames, scales)
    return _stitch_rings(rings, frames.closed, True, True, section2d)


def revolve(
    section_spec,
    offset=(0.0, 0.0),
    axis_point=(0.0, 0.0, 0.0),
    axis_dir=(0.0, 0.0, 1.0),
    angle: float = 2 * math.pi,
    steps: int = 64,
    section_samples: int | None = None,
) -> Mesh:
    """Rotate a section around an axis; partial turns are capped.

    Section (u, v) coordinates (plus ``offset``) map to (radial distance,
    axis offset). The section must lie strictly on the positive-u side.
    """
    if steps < 3:
        raise GeometryError("revolve needs steps >= 3")
    if not 0 < angle <= 2 * math.pi + FULL_TURN_TOL:
        raise GeometryError("revolve angle must lie in (0, 2*pi]")
    section2d = eval_section(section_spec, section_samples) + np.asarray(offset, dtype=float)
    if section2d[:, 0].min() <= 1e-12:
        raise SectionCrossesAxis("revolve section must stay strictly off the axis")

    d = np.asarray(axis_dir, dtype=float)
    norm = np.linalg.norm(d)
    if norm < 1e-12:
        raise GeometryError("revolve axis direction is zero")
    d = d / norm
    # radial reference: projection of +x off the axis, else +y
    trial = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(trial, d)) > 1.0 - 1e-9:
        trial = np.array([0.0, 1.0, 0.0])
    r0 = trial - np.dot(trial, d) * d
    r0 /= np.linalg.norm(r0)
    r90 = np.cross(d, r0)
    p0 = np.asarray(axis_point, dtype=float)

    full = abs(angle - 2 * math.pi) <= FULL_TURN_TOL
    k = steps if full else steps + 1
    sweep_angle = 2 * math.pi if full else angle
    thetas = (
        2 * np.pi * np.arange(steps) / steps
        if full
        else np.linspace(0.0, sweep_angle, k)
    )
    u = section2d[:, 0]
    v = section2d[:, 1]
    rings = np.empty((k, len(section2d), 3))
    for i, th in enumerate(thetas):
        radial = math.cos(th) * r0 + math.sin(th) * r90
        rings[i] = p0 + np.outer(u, radial) + np.outer(v, d)
    return _stitch_rings(rings, full, True, True, section2d)
