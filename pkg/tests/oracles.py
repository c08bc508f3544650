"""Independent reference implementations used to check the fast paths.

Everything here is deliberately brute force and shares no code with the
implementations under test.
"""

from __future__ import annotations

import numpy as np


def brute_force_chamfer(p: np.ndarray, q: np.ndarray) -> float:
    """O(n*m) L2 Chamfer distance: mean squared NN distance, both ways."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d2 = ((p[:, None, :] - q[None, :, :]) ** 2).sum(axis=2)
    return float(d2.min(axis=1).mean() + d2.min(axis=0).mean())


def shoelace_area(points: np.ndarray) -> float:
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Proper or touching intersection of two closed 2D segments."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on(a, b, c):
        return (
            abs(orient(a, b, c)) < 1e-12
            and min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    return on(q1, q2, p1) or on(q1, q2, p2) or on(p1, p2, q1) or on(p1, p2, q2)


def polygon_is_simple(points) -> bool:
    pts = [tuple(p) for p in points]
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                return True
    return False


def point_in_mesh_fraction(mesh, points: np.ndarray) -> np.ndarray:
    """Slow even-odd inside test for points against a closed mesh (+x rays)."""
    tri = mesh.vertices[mesh.triangles]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    inside = np.zeros(len(points), dtype=bool)
    for i, p in enumerate(points):
        d0 = b[:, 1:] - a[:, 1:]
        d1 = c[:, 1:] - a[:, 1:]
        den = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
        w = p[1:] - a[:, 1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (w[:, 0] * d1[:, 1] - w[:, 1] * d1[:, 0]) / den
            t = (d0[:, 0] * w[:, 1] - d0[:, 1] * w[:, 0]) / den
        ok = (np.abs(den) > 1e-14) & (s > 0) & (t > 0) & (s + t < 1)
        x_cross = (1 - s - t) * a[:, 0] + s * b[:, 0] + t * c[:, 0]
        inside[i] = (np.count_nonzero(ok & (x_cross > p[0])) % 2) == 1
    return inside


def voxel_boolean(bits_a: np.ndarray, bits_b: np.ndarray, op: str) -> np.ndarray:
    if op == "union":
        return bits_a | bits_b
    if op == "intersection":
        return bits_a & bits_b
    if op == "difference":
        return bits_a & ~bits_b
    raise ValueError(op)


def grid_iou(a: np.ndarray, b: np.ndarray) -> float:
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum() / union)


def _clip_polygon_halfspace(poly, axis, bound, keep_below):
    """Sutherland-Hodgman clip of a 3D polygon against an axis-aligned plane."""
    out = []
    n = len(poly)
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        da = (a[axis] - bound) * (-1 if keep_below else 1)
        db = (b[axis] - bound) * (-1 if keep_below else 1)
        if da >= 0:
            out.append(a)
            if db < 0:
                t = da / (da - db)
                out.append(a + t * (b - a))
        elif db >= 0:
            t = da / (da - db)
            out.append(a + t * (b - a))
    return out


def triangle_overlaps_box(tri, lo, hi) -> bool:
    """Exact triangle/axis-aligned-box overlap by iterative polygon clipping."""
    poly = [np.asarray(v, dtype=float) for v in tri]
    for axis in range(3):
        poly = _clip_polygon_halfspace(poly, axis, lo[axis], keep_below=False)
        if not poly:
            return False
        poly = _clip_polygon_halfspace(poly, axis, hi[axis], keep_below=True)
        if not poly:
            return False
    return True


def brute_characteristic_cell(mesh, object_bbox, resolution=32):
    """Minimal (z, x, y) occupied cell via clip-based triangle-box overlap.

    Independent of the implementation under test: occupancy is decided by
    Sutherland-Hodgman clipping rather than separating-axis tests.
    """
    lo = np.asarray(object_bbox[0], dtype=float)
    hi = np.asarray(object_bbox[1], dtype=float)
    ext = hi - lo
    h = np.where(ext > 0, ext / resolution, 1.0)
    tri = mesh.vertices[mesh.triangles]
    tlo_all = np.clip(
        np.floor((tri.min(axis=1) - lo) / h - 1e-12).astype(int), 0, resolution - 1
    )
    thi_all = np.clip(
        np.floor((tri.max(axis=1) - lo) / h + 1e-12).astype(int), 0, resolution - 1
    )
    # elementwise lower bound of a triangle's cells is also a lexicographic
    # lower bound on its minimal (z, x, y) cell: sound pruning order
    bounds = [(int(l[2]), int(l[0]), int(l[1])) for l in tlo_all]
    order = sorted(range(len(tri)), key=lambda k: bounds[k])
    best = None
    for k in order:
        if best is not None and bounds[k] >= best:
            break
        t = tri[k]
        tlo, thi = tlo_all[k], thi_all[k]
        for iz in range(tlo[2], thi[2] + 1):
            for ix in range(tlo[0], thi[0] + 1):
                for iy in range(tlo[1], thi[1] + 1):
                    cell = (iz, ix, iy)
                    if best is not None and cell >= best:
                        continue
                    clo = lo + np.array([ix, iy, iz]) * h
                    chi = clo + h
                    if triangle_overlaps_box(t, clo - 1e-9 * h, chi + 1e-9 * h):
                        best = cell
    assert best is not None
    return best
