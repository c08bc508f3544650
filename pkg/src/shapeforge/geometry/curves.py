"""Section and trajectory evaluation, with rotation-minimizing sweep frames.

Sections evaluate to counter-clockwise simple closed 2D polylines (no
repeated endpoint). Trajectories evaluate to a :class:`FrameField`:
positions with orthonormal (tangent, normal, binormal) frames propagated
by the double-reflection method, so the cross-section never flips at
inflections. Closed trajectories distribute the residual twist evenly so
the first and last frames coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dsl.types import (
    ArcSection,
    ArcTrajectory,
    BezierSection,
    BezierTrajectory,
    CircleSection,
    CircleTrajectory,
    LineTrajectory,
    PolygonSection,
    PolylineTrajectory,
    RectangleSection,
    RectangleTrajectory,
)
from ..errors import DegenerateTangent, GeometryError, SelfIntersection
from ..geom2d import catmull_rom, is_simple_closed, signed_area


@dataclass
class FrameField:
    positions: np.ndarray  # (k, 3)
    tangents: np.ndarray  # (k, 3) unit
    normals: np.ndarray  # (k, 3) unit
    binormals: np.ndarray  # (k, 3) unit
    closed: bool

    def __len__(self):
        return len(self.positions)


@dataclass(frozen=True)
class ScaleProfile:
    """Piecewise-linear uniform scale over normalized arc length t in [0, 1]."""

    keys: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ts = [t for t, _ in self.keys]
        if not ts or any(b <= a for a, b in zip(ts, ts[1:])):
            raise GeometryError("scale profile keys must be strictly increasing")
        if any(s <= 0 for _, s in self.keys):
            raise GeometryError("scale profile values must be > 0")

    @staticmethod
    def from_pairs(pairs) -> "ScaleProfile":
        keys = [tuple(map(float, p)) for p in pairs]
        if keys[0][0] > 0.0:
            keys.insert(0, (0.0, keys[0][1]))
        if keys[-1][0] < 1.0:
            keys.append((1.0, keys[-1][1]))
        return ScaleProfile(tuple(keys))

    def __call__(self, t) -> np.ndarray:
        ts = np.array([k[0] for k in self.keys])
        ss = np.array([k[1] for k in self.keys])
        return np.interp(np.asarray(t, dtype=float), ts, ss)

    def is_constant(self) -> bool:
        vals = {s for _, s in self.keys}
        return len(vals) == 1


CONSTANT_PROFILE = ScaleProfile(((0.0, 1.0), (1.0, 1.0)))


# --- sections ----------------------------------------------------------------


def eval_section(spec, n: int | None = None, check_simple: bool = True) -> np.ndarray:
    """Evaluate a section to a CCW closed polyline (k, 2), endpoint not repeated."""
    if isinstance(spec, RectangleSection):
        w, h = spec.width / 2.0, spec.height / 2.0
        pts = np.array([[w, -h], [w, h], [-w, h], [-w, -h]])
    elif isinstance(spec, CircleSection):
        k = n if n is not None else spec.resolution
        if k < 3:
            raise GeometryError("circle section needs at least 3 samples")
        ang = 2 * np.pi * np.arange(k) / k
        pts = spec.radius * np.column_stack([np.cos(ang), np.sin(ang)])
    elif isinstance(spec, ArcSection):
        k = n if n is not None else spec.resolution
        if k < 2:
            raise GeometryError("arc section needs at least 2 samples")
        ang = np.linspace(spec.start_angle, spec.end_angle, k + 1)
        arc = spec.radius * np.column_stack([np.cos(ang), np.sin(ang)])
        pts = arc if spec.chord_closed else np.concatenate([arc, [[0.0, 0.0]]])
    elif isinstance(spec, PolygonSection):
        pts = np.asarray(spec.points, dtype=float)
    elif isinstance(spec, BezierSection):
        k = n if n is not None else spec.resolution
        pts = catmull_rom(np.asarray(spec.points, dtype=float), k, spec.closed)
    else:
        raise GeometryError(f"unknown section {spec!r}")

    if signed_area(pts) < 0:
        pts = pts[::-1].copy()
    if check_simple and not is_simple_closed(pts):
        raise SelfIntersection("section polyline self-intersects")
    return np.ascontiguousarray(pts)


# --- trajectories ------------------------------------------------------------


def _plane_basis(axis) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal (u, v) spanning the plane normal to ``axis``."""
    d = np.asarray(axis, dtype=float)
    d = d / np.linalg.norm(d)
    trial = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(trial, d)) > 1.0 - 1e-9:
        trial = np.array([0.0, 1.0, 0.0])
    u = trial - np.dot(trial, d) * d
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v


def _initial_normal(tangent: np.ndarray) -> np.ndarray:
    """Projection of +z onto the tangent's orthogonal plane; +x fallback."""
    ref = np.array([0.0, 0.0, 1.0])
    n = ref - np.dot(ref, tangent) * tangent
    norm = np.linalg.norm(n)
    if norm < 1e-9:
        ref = np.array([1.0, 0.0, 0.0])
        n = ref - np.dot(ref, tangent) * tangent
        norm = np.linalg.norm(n)
    return n / norm


def _rmf(positions: np.ndarray, tangents: np.ndarray, closed: bool) -> FrameField:
    """Double-reflection rotation-minimizing frames with closure correction."""
    k = len(positions)
    normals = np.empty_like(positions)
    normals[0] = _initial_normal(tangents[0])
    for i in range(k - 1):
        v1 = positions[i + 1] - positions[i]
        c1 = float(np.dot(v1, v1))
        if c1 < 1e-24:
            raise DegenerateTangent("consecutive trajectory samples coincide")
        rl = normals[i] - (2.0 / c1) * np.dot(v1, normals[i]) * v1
        tl = tangents[i] - (2.0 / c1) * np.dot(v1, tangents[i]) * v1
        v2 = tangents[i + 1] - tl
        c2 = float(np.dot(v2, v2))
        if c2 < 1e-24:
            normals[i + 1] = rl
        else:
            normals[i + 1] = rl - (2.0 / c2) * np.dot(v2, rl) * v2
        # keep exactly orthonormal against drift
        normals[i + 1] -= np.dot(normals[i + 1], tangents[i + 1]) * tangents[i + 1]
        normals[i + 1] /= np.linalg.norm(normals[i + 1])

    if closed:
        # propagate across the closing segment and measure the twist mismatch
        v1 = positions[0] - positions[-1]
        c1 = float(np.dot(v1, v1))
        n_back = normals[-1]
        if c1 >= 1e-24:
            rl = n_back - (2.0 / c1) * np.dot(v1, n_back) * v1
            tl = tangents[-1] - (2.0 / c1) * np.dot(v1, tangents[-1]) * v1
            v2 = tangents[0] - tl
            c2 = float(np.dot(v2, v2))
            n_back = rl if c2 < 1e-24 else rl - (2.0 / c2) * np.dot(v2, rl) * v2
            n_back -= np.dot(n_back, tangents[0]) * tangents[0]
            n_back /= np.linalg.norm(n_back)
        b0 = np.cross(tangents[0], normals[0])
        angle = math.atan2(float(np.dot(n_back, b0)), float(np.dot(n_back, normals[0])))
        if abs(angle) > 1e-15:
            # distribute -angle over the k closing steps
            for i in range(1, k):
                a = -angle * i / k
                b = np.cross(tangents[i], normals[i])
                normals[i] = math.cos(a) * normals[i] + math.sin(a) * b
    binormals = np.cross(tangents, normals)
    return FrameField(positions, tangents, normals, binormals, closed)


def _traj_samples(spec, m: int | None):
    """Positions + unit tangents for a trajectory spec. Returns (pos, tan, closed)."""
    if isinstance(spec, LineTrajectory):
        k = m if m is not None else 2
        if k < 2:
            raise GeometryError("line trajectory needs at least 2 samples")
        p0 = np.asarray(spec.start, dtype=float)
        p1 = np.asarray(spec.end, dtype=float)
        d = p1 - p0
        norm = np.linalg.norm(d)
        if norm < 1e-12:
            raise DegenerateTangent("line trajectory endpoints coincide")
        ts = np.linspace(0.0, 1.0, k)
        pos = p0 + np.outer(ts, d)
        tan = np.tile(d / norm, (k, 1))
        return pos, tan, False
    if isinstance(spec, PolylineTrajectory):
        pos = np.asarray(spec.points, dtype=float)
        return pos, _polyline_tangents(pos, closed=False), False
    if isinstance(spec, CircleTrajectory):
        k = m if m is not None else spec.resolution
        u, v = _plane_basis(spec.axis)
        ang = 2 * np.pi * np.arange(k) / k
        c = np.asarray(spec.center, dtype=float)
        pos = c + spec.radius * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), v))
        tan = -np.outer(np.sin(ang), u) + np.outer(np.cos(ang), v)
        return pos, tan, True
    if isinstance(spec, ArcTrajectory):
        k = m if m is not None else spec.resolution
        u, v = _plane_basis(spec.axis)
        ang = np.linspace(spec.start_angle, spec.end_angle, k)
        sign = 1.0 if spec.end_angle >= spec.start_angle else -1.0
        c = np.asarray(spec.center, dtype=float)
        pos = c + spec.radius * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), v))
        tan = sign * (-np.outer(np.sin(ang), u) + np.outer(np.cos(ang), v))
        return pos, tan, False
    if isinstance(spec, RectangleTrajectory):
        u = np.asarray(spec.axis_u, dtype=float)
        u /= np.linalg.norm(u)
        v = np.asarray(spec.axis_v, dtype=float)
        v -= np.dot(v, u) * u
        v /= np.linalg.norm(v)
        c = np.asarray(spec.center, dtype=float)
        w, h = spec.width / 2.0, spec.height / 2.0
        pos = np.array([c + w * u - h * v, c + w * u + h * v, c - w * u + h * v, c - w * u - h * v])
        return pos, _polyline_tangents(pos, closed=True), True
    if isinstance(spec, BezierTrajectory):
        k = m if m is not None else spec.resolution
        pos = catmull_rom(np.asarray(spec.points, dtype=float), k, closed=False)
        return pos, _polyline_tangents(pos, closed=False), False
    raise GeometryError(f"unknown trajectory {spec!r}")


def _polyline_tangents(pos: np.ndarray, closed: bool) -> np.ndarray:
    k = len(pos)
    if k < 2:
        raise DegenerateTangent("trajectory needs at least 2 samples")
    if closed:
        segs = np.roll(pos, -1, axis=0) - pos
    else:
        segs = pos[1:] - pos[:-1]
    lens = np.linalg.norm(segs, axis=1)
    if np.any(lens < 1e-12):
        raise DegenerateTangent("consecutive trajectory samples coincide")
    dirs = segs / lens[:, None]
    tan = np.empty_like(pos)
    if closed:
        tan[:] = dirs + np.roll(dirs, 1, axis=0)
    else:
        tan[0] = dirs[0]
        tan[-1] = dirs[-1]
        if k > 2:
            tan[1:-1] = dirs[1:] + dirs[:-1]
    tan /= np.linalg.norm(tan, axis=1)[:, None]
    return tan


def eval_trajectory(spec, m: int | None = None) -> FrameField:
    pos, tan, closed = _traj_samples(spec, m)
    return _rmf(pos, tan, closed)


def arc_lengths(positions: np.ndarray, closed: bool) -> np.ndarray:
    """Cumulative arc length at each sample; closed curves append the wrap length."""
    segs = np.diff(positions, axis=0)
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(segs, axis=1))])
    if closed:
        cum = np.append(cum, cum[-1] + np.linalg.norm(positions[0] - positions[-1]))
    return cum


def frames_at_fractions(spec, fractions) -> FrameField:
    """Frames at exact arc-length fractions, analytic where the variant allows.

    Used for array placement so that rotational symmetry of the trajectory
    carries over exactly to the instances.
    """
    fr = np.asarray(fractions, dtype=float)
    if isinstance(spec, LineTrajectory):
        p0 = np.asarray(spec.start, dtype=float)
        p1 = np.asarray(spec.end, dtype=float)
        d = p1 - p0
        tangent = d / np.linalg.norm(d)
        pos = p0 + np.outer(fr, d)
        tan = np.tile(tangent, (len(fr), 1))
        return _rmf(pos, tan, False)
    if isinstance(spec, (CircleTrajectory, ArcTrajectory)):
        u, v = _plane_basis(spec.axis)
        if isinstance(spec, CircleTrajectory):
            ang = 2 * np.pi * fr
            sign = 1.0
        else:
            ang = spec.start_angle + (spec.end_angle - spec.start_angle) * fr
            sign = 1.0 if spec.end_angle >= spec.start_angle else -1.0
        c = np.asarray(spec.center, dtype=float)
        pos = c + spec.radius * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), v))
        tan = sign * (-np.outer(np.sin(ang), u) + np.outer(np.cos(ang), v))
        # analytic rotation-minimizing frames for a planar circle: the
        # initial normal rotates rigidly with the point around the axis
        d = np.asarray(spec.axis, dtype=float)
        d /= np.linalg.norm(d)
        n0 = _initial_normal(tan[0])
        a0 = ang[0] if len(ang) else 0.0
        normals = np.empty_like(pos)
        for i, a in enumerate(ang):
            normals[i] = _rotate_about(n0, d, a - a0)
            normals[i] -= np.dot(normals[i], tan[i]) * tan[i]
            normals[i] /= np.linalg.norm(normals[i])
        binormals = np.cross(tan, normals)
        return FrameField(pos, tan, normals, binormals, isinstance(spec, CircleTrajectory))
    # generic: dense table + linear interpolation of positions, nearest frames
    field = eval_trajectory(spec, m=_dense_count(spec))
    cum = arc_lengths(field.positions, field.closed)
    total = cum[-1]
    targets = fr * total
    pos_ext = field.positions
    if field.closed:
        pos_ext = np.vstack([field.positions, field.positions[0]])
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(cum) - 2)
    seg_len = cum[idx + 1] - cum[idx]
    w = np.where(seg_len > 0, (targets - cum[idx]) / np.maximum(seg_len, 1e-300), 0.0)
    pos = pos_ext[idx] * (1 - w[:, None]) + pos_ext[(idx + 1) % len(pos_ext)] * w[:, None]
    take = np.minimum(idx, len(field.positions) - 1)
    tan = field.tangents[take % len(field.tangents)]
    normals = field.normals[take % len(field.normals)]
    binormals = field.binormals[take % len(field.binormals)]
    return FrameField(pos, tan, normals, binormals, field.closed)


def _dense_count(spec) -> int:
    if isinstance(spec, PolylineTrajectory):
        return len(spec.points)
    if isinstance(spec, RectangleTrajectory):
        return 4
    if isinstance(spec, BezierTrajectory):
        return max(256, spec.resolution * max(len(spec.points) - 1, 1))
    return 256


def _rotate_about(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1 - c)
