"""Similarity-transform algebra: quaternions, composition, inversion, application.

Transforms apply scale, then rotation, then translation. Quaternions are
scalar-first (w, x, y, z) and are renormalized whenever a rotation matrix
is built, since program text stores them with 6 significant digits.
"""

from __future__ import annotations

import math

import numpy as np

from .dsl.types import Quat, SimilarityTransform, Vec3
from .errors import NonUniformRescaleOfRotated

_AXIS_ALIGNED_TOL = 1e-5
_UNIFORM_TOL = 1e-12


def quat_normalize(q: Quat) -> Quat:
    n = math.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2 + q[3] ** 2)
    if n == 0.0:
        raise ValueError("zero quaternion")
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def quat_mul(a: Quat, b: Quat) -> Quat:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_conjugate(q: Quat) -> Quat:
    return (q[0], -q[1], -q[2], -q[3])


def quat_from_axis_angle(axis: Vec3, angle: float) -> Quat:
    n = math.sqrt(axis[0] ** 2 + axis[1] ** 2 + axis[2] ** 2)
    if n == 0.0:
        raise ValueError("zero rotation axis")
    s = math.sin(angle / 2.0) / n
    return (math.cos(angle / 2.0), axis[0] * s, axis[1] * s, axis[2] * s)


def quat_to_matrix(q: Quat) -> np.ndarray:
    w, x, y, z = quat_normalize(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_rotate(q: Quat, v) -> np.ndarray:
    return quat_to_matrix(q) @ np.asarray(v, dtype=float)


def quat_between(a: Vec3, b: Vec3) -> Quat:
    """Shortest-arc quaternion rotating unit vector ``a`` onto unit vector ``b``."""
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    d = float(np.dot(av, bv))
    if d < -1.0 + 1e-12:
        # antiparallel: rotate pi about any perpendicular axis
        perp = np.cross(av, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-9:
            perp = np.cross(av, [0.0, 1.0, 0.0])
        perp /= np.linalg.norm(perp)
        return (0.0, perp[0], perp[1], perp[2])
    c = np.cross(av, bv)
    q = (1.0 + d, c[0], c[1], c[2])
    return quat_normalize(q)


def matrix_to_quat(m: np.ndarray) -> Quat:
    t = float(np.trace(m))
    if t > 0:
        s = math.sqrt(t + 1.0) * 2
        return quat_normalize(
            (0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s)
        )
    i = int(np.argmax(np.diag(m)))
    j, k = (i + 1) % 3, (i + 2) % 3
    s = math.sqrt(max(m[i, i] - m[j, j] - m[k, k] + 1.0, 0.0)) * 2
    q = [0.0, 0.0, 0.0, 0.0]
    q[0] = (m[k, j] - m[j, k]) / s
    q[i + 1] = 0.25 * s
    q[j + 1] = (m[j, i] + m[i, j]) / s
    q[k + 1] = (m[k, i] + m[i, k]) / s
    return quat_normalize(tuple(q))


def is_uniform_scale(scale: Vec3, tol: float = _UNIFORM_TOL) -> bool:
    return abs(scale[0] - scale[1]) <= tol * abs(scale[0]) and abs(
        scale[0] - scale[2]
    ) <= tol * abs(scale[0])


def is_axis_aligned(q: Quat, tol: float = _AXIS_ALIGNED_TOL) -> bool:
    """True when the rotation maps coordinate axes to signed coordinate axes."""
    m = quat_to_matrix(q)
    snapped = np.round(m)
    return bool(np.all(np.abs(m - snapped) <= tol) and np.all(np.abs(np.abs(snapped).sum(axis=0) - 1) < 0.5))


def transform_points(points, t: SimilarityTransform) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    r = quat_to_matrix(t.rotation)
    scaled = p * np.asarray(t.scale, dtype=float)
    return scaled @ r.T + np.asarray(t.location, dtype=float)


def compose(outer: SimilarityTransform, inner: SimilarityTransform) -> SimilarityTransform:
    """Transform equal to applying ``inner`` first, then ``outer``.

    Raises :class:`NonUniformRescaleOfRotated` when ``outer`` has
    anisotropic scale and ``inner``'s rotation is not axis-aligned with
    the scaling frame, since the composite would leave the similarity
    class representable by (scale, rotation, translation).
    """
    r_outer = quat_to_matrix(outer.rotation)
    s_outer = np.asarray(outer.scale, dtype=float)
    location = tuple(
        np.asarray(outer.location, dtype=float)
        + r_outer @ (s_outer * np.asarray(inner.location, dtype=float))
    )
    rotation = quat_mul(outer.rotation, inner.rotation)
    if is_uniform_scale(outer.scale):
        scale = tuple(s_outer[0] * np.asarray(inner.scale, dtype=float))
    elif is_axis_aligned(inner.rotation):
        r_inner = np.round(quat_to_matrix(inner.rotation))
        # diag(s_outer) @ R == R @ diag(d) with d_j picking the axis R sends e_j to
        d = np.abs(r_inner).T @ s_outer
        scale = tuple(d * np.asarray(inner.scale, dtype=float))
    else:
        raise NonUniformRescaleOfRotated(
            "cannot compose an anisotropic rescale onto a rotated statement"
        )
    return SimilarityTransform(
        location=(location[0], location[1], location[2]),
        rotation=rotation,
        scale=(scale[0], scale[1], scale[2]),
    )


def invert(t: SimilarityTransform) -> SimilarityTransform:
    """Inverse transform. Supports uniform scale with any rotation, or
    per-axis scale with an axis-aligned rotation."""
    r = quat_to_matrix(t.rotation)
    s = np.asarray(t.scale, dtype=float)
    loc = np.asarray(t.location, dtype=float)
    if is_uniform_scale(t.scale):
        inv_s = 1.0 / s[0]
        rotation = quat_normalize(quat_conjugate(t.rotation))
        location = tuple(-inv_s * (r.T @ loc))
        return SimilarityTransform(
            location=(location[0], location[1], location[2]),
            rotation=rotation,
            scale=(inv_s, inv_s, inv_s),
        )
    if is_axis_aligned(t.rotation):
        snapped = np.round(r)
        inv_s = 1.0 / s
        scale = np.abs(snapped) @ inv_s
        rotation = quat_normalize(quat_conjugate(t.rotation))
        location = tuple(-inv_s * (r.T @ loc))
        return SimilarityTransform(
            location=(location[0], location[1], location[2]),
            rotation=rotation,
            scale=(scale[0], scale[1], scale[2]),
        )
    raise NonUniformRescaleOfRotated("cannot invert a rotated anisotropic transform")
