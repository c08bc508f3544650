"""Fill-grid solids: triangulate a closed 3D boundary and extrude it."""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError, NonSimpleProjection
from ..geom2d import best_fit_plane, ear_clip, is_simple_closed, signed_area
from .mesh import Mesh, ensure_outward, make_mesh


def fill_grid(boundary, thickness: float) -> Mesh:
    """Fill a closed 3D polyline into a surface and extrude it to a slab.

    The boundary is ear-clipped in its least-squares plane (vertices keep
    their 3D positions), offset by +-thickness/2 along the plane normal,
    and stitched with side walls. Watertight.
    """
    pts = np.asarray(boundary, dtype=float)
    n = len(pts)
    if n < 3:
        raise GeometryError("fill_grid boundary needs at least 3 points")
    if thickness <= 0:
        raise GeometryError("fill_grid thickness must be > 0")
    centroid, normal, e1, e2 = best_fit_plane(pts)
    uv = np.column_stack([(pts - centroid) @ e1, (pts - centroid) @ e2])
    if not is_simple_closed(uv):
        raise NonSimpleProjection("boundary does not project to a simple polygon")
    if signed_area(uv) < 0:
        pts = pts[::-1].copy()
        uv = uv[::-1].copy()
    surface = ear_clip(uv)

    half = 0.5 * thickness * normal
    top = pts + half
    bottom = pts - half
    verts = np.vstack([top, bottom])
    tris: list[list[int]] = []
    # top faces +normal (boundary CCW in-plane), bottom reversed
    for a, b, c in surface:
        tris.append([a, b, c])
    for a, b, c in surface:
        tris.append([n + b, n + a, n + c])
    # side walls: boundary edge (j -> j1) on top pairs with reversed bottom edge
    pairs = []
    for j in range(n):
        j1 = (j + 1) % n
        tris.append([j, n + j, n + j1])
        tris.append([j, n + j1, j1])
        pairs.append([len(tris) - 2, len(tris) - 1])
    mesh = make_mesh(verts, tris, quad_pairs=np.array(pairs))
    return ensure_outward(mesh)
