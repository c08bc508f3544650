"""Planar polygon utilities: area, simplicity test, spline sampling, ear clipping."""

from __future__ import annotations

import numpy as np

from .errors import GeometryError


def signed_area(points: np.ndarray) -> float:
    """Shoelace area of a closed polyline given without the repeated endpoint."""
    p = np.asarray(points, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(p1, p2, q1, q2, eps=1e-12) -> bool:
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True

    def on_seg(a, b, c):
        return (
            abs(_orient(a, b, c)) <= eps
            and min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps
        )

    return on_seg(q1, q2, p1) or on_seg(q1, q2, p2) or on_seg(p1, p2, q1) or on_seg(p1, p2, q2)


def is_simple_closed(points, eps=1e-12) -> bool:
    """True when the closed polyline neither self-intersects nor degenerates.

    Adjacent segments only share their common endpoint; every non-adjacent
    segment pair must be disjoint. All-pairs test vectorized over numpy,
    O(n^2) work and memory, fine for modest vertex counts.
    """
    p = np.asarray(points, dtype=float)
    n = len(p)
    if n < 3:
        return False
    a = p
    b = np.roll(p, -1, axis=0)
    d = b - a
    if np.any(np.einsum("ij,ij->i", d, d) <= eps * eps):
        return False

    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    if len(i) == 0:
        return True
    p1, p2 = a[i], b[i]
    q1, q2 = a[j], b[j]

    def orient(o, s, t):
        return (s[:, 0] - o[:, 0]) * (t[:, 1] - o[:, 1]) - (s[:, 1] - o[:, 1]) * (
            t[:, 0] - o[:, 0]
        )

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    proper = (
        ((d1 > eps) & (d2 < -eps) | (d1 < -eps) & (d2 > eps))
        & ((d3 > eps) & (d4 < -eps) | (d3 < -eps) & (d4 > eps))
    )
    if proper.any():
        return False

    def on_seg(o, s, d_val, t):
        lo = np.minimum(o, s) - eps
        hi = np.maximum(o, s) + eps
        return (
            (np.abs(d_val) <= eps)
            & np.all(t >= lo, axis=1)
            & np.all(t <= hi, axis=1)
        )

    touching = (
        on_seg(q1, q2, d1, p1)
        | on_seg(q1, q2, d2, p2)
        | on_seg(p1, p2, d3, q1)
        | on_seg(p1, p2, d4, q2)
    )
    return not touching.any()


def catmull_rom(points: np.ndarray, per_segment: int, closed: bool) -> np.ndarray:
    """Sample a cubic Hermite spline through anchor points with auto tangents.

    Tangent at an interior anchor is the central difference of its
    neighbors; open ends use one-sided differences. Returns the sampled
    polyline including anchors; for closed splines the duplicate final
    anchor is omitted.
    """
    p = np.asarray(points, dtype=float)
    n = len(p)
    if n < 2:
        raise GeometryError("spline needs at least 2 anchor points")
    if closed:
        prev_p = np.roll(p, 1, axis=0)
        next_p = np.roll(p, -1, axis=0)
        tangents = 0.5 * (next_p - prev_p)
    else:
        tangents = np.empty_like(p)
        tangents[0] = p[1] - p[0]
        tangents[-1] = p[-1] - p[-2]
        if n > 2:
            tangents[1:-1] = 0.5 * (p[2:] - p[:-2])

    seg_count = n if closed else n - 1
    t = np.linspace(0.0, 1.0, per_segment + 1)[:-1]  # exclude segment end
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2

    chunks = []
    for i in range(seg_count):
        j = (i + 1) % n
        seg = (
            np.outer(h00, p[i])
            + np.outer(h10, tangents[i])
            + np.outer(h01, p[j])
            + np.outer(h11, tangents[j])
        )
        chunks.append(seg)
    if not closed:
        chunks.append(p[-1][None, :])
    return np.concatenate(chunks, axis=0)


def ear_clip(points: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple polygon (CCW) by ear clipping.

    Returns index triples into ``points``; output triangles are CCW.
    """
    p = np.asarray(points, dtype=float)
    n = len(p)
    if n < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    if signed_area(p) < 0:
        raise GeometryError("ear_clip expects counter-clockwise input")
    idx = list(range(n))
    triangles: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * n * n:
            raise GeometryError("ear clipping failed (non-simple polygon?)")
        clipped = False
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = p[i0], p[i1], p[i2]
            cross = _orient(a, b, c)
            if cross <= 1e-14:
                continue  # reflex or collinear vertex: not an ear
            ear = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                q = p[j]
                # strict interior test keeps shared-boundary vertices legal
                if (
                    _orient(a, b, q) > -1e-14
                    and _orient(b, c, q) > -1e-14
                    and _orient(c, a, q) > -1e-14
                ):
                    ear = False
                    break
            if ear:
                triangles.append((i0, i1, i2))
                idx.pop(k)
                clipped = True
                break
        if not clipped:
            # fall back: clip the least-reflex vertex to make progress on
            # nearly-degenerate inputs
            best_k = max(
                range(len(idx)),
                key=lambda k: _orient(
                    p[idx[(k - 1) % len(idx)]], p[idx[k]], p[idx[(k + 1) % len(idx)]]
                ),
            )
            m = len(idx)
            triangles.append(
                (idx[(best_k - 1) % m], idx[best_k], idx[(best_k + 1) % m])
            )
            idx.pop(best_k)
    triangles.append((idx[0], idx[1], idx[2]))
    return triangles


def best_fit_plane(points: np.ndarray):
    """Least-squares plane of a 3D point set.

    Returns (centroid, normal, e1, e2) with a deterministic sign choice:
    the normal has non-negative dot with +z, breaking ties toward +y then
    +x; (e1, e2, normal) is right-handed.
    """
    p = np.asarray(points, dtype=float)
    centroid = p.mean(axis=0)
    q = p - centroid
    _, _, vt = np.linalg.svd(q, full_matrices=False)
    normal = vt[-1]
    for comp in (2, 1, 0):
        if abs(normal[comp]) > 1e-12:
            if normal[comp] < 0:
                normal = -normal
            break
    # in-plane basis: projection of the most orthogonal world axis
    trial = np.eye(3)[np.argmin(np.abs(normal))]
    e1 = trial - np.dot(trial, normal) * normal
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    return centroid, normal, e1, e2
