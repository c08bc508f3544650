"""Indexed triangle meshes with watertightness tracking.

Vertices are float64 (n, 3) arrays, triangles int64 (m, 3) arrays. Meshes
are immutable after construction (arrays are locked); the ``watertight``
flag is computed once: every undirected edge must be shared by exactly two
triangles with opposite directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..dsl.types import SimilarityTransform
from ..errors import NonWatertight
from ..transforms import quat_to_matrix

WELD_TOL = 1e-9
DEGENERATE_AREA = 1e-12


@dataclass
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    watertight: bool
    # optional pairing of triangle indices that form quads, kept for export
    quad_pairs: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)
        if self.quad_pairs is not None:
            self.quad_pairs.setflags(write=False)

    @property
    def is_empty(self) -> bool:
        return len(self.triangles) == 0


def edge_manifold(triangles: np.ndarray) -> bool:
    """Each undirected edge used exactly twice, once in each direction."""
    if len(triangles) == 0:
        return False
    t = triangles
    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    lo = directed.min(axis=1)
    hi = directed.max(axis=1)
    und = lo.astype(np.int64) * (t.max() + 1) + hi
    order = np.argsort(und, kind="stable")
    und_sorted = und[order]
    # every undirected edge must appear exactly twice
    uniq, counts = np.unique(und_sorted, return_counts=True)
    if not np.all(counts == 2):
        return False
    # consistent winding: the two directed copies must be opposite
    fwd = directed[order]
    a = fwd[0::2]
    b = fwd[1::2]
    return bool(np.all(a == b[:, ::-1]))


def make_mesh(
    vertices,
    triangles,
    quad_pairs=None,
    weld: bool = False,
) -> Mesh:
    v = np.ascontiguousarray(np.asarray(vertices, dtype=np.float64).reshape(-1, 3))
    t = np.ascontiguousarray(np.asarray(triangles, dtype=np.int64).reshape(-1, 3))
    q = None if quad_pairs is None else np.asarray(quad_pairs, dtype=np.int64).reshape(-1, 2)
    if weld:
        v, t = weld_vertices(v, t)
        q = None
    return Mesh(v, t, edge_manifold(t), q)


def empty_mesh() -> Mesh:
    return Mesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64), False)


def weld_vertices(vertices, triangles, tol: float = WELD_TOL):
    """Merge vertices within ``tol`` and drop degenerate triangles."""
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64)
    if len(v) == 0:
        return v.reshape(0, 3), t.reshape(0, 3)
    keys = np.round(v / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    new_v = v[first]
    new_t = inverse[t]
    # drop triangles with repeated vertices or negligible area
    distinct = (
        (new_t[:, 0] != new_t[:, 1])
        & (new_t[:, 1] != new_t[:, 2])
        & (new_t[:, 0] != new_t[:, 2])
    )
    new_t = new_t[distinct]
    if len(new_t):
        a = new_v[new_t[:, 0]]
        cr = np.cross(new_v[new_t[:, 1]] - a, new_v[new_t[:, 2]] - a)
        areas = 0.5 * np.linalg.norm(cr, axis=1)
        new_t = new_t[areas > DEGENERATE_AREA]
    # drop unused vertices for stable output
    used = np.unique(new_t)
    remap = np.full(len(new_v), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return new_v[used], (remap[new_t] if len(new_t) else new_t)


def triangle_areas(m: Mesh) -> np.ndarray:
    a = m.vertices[m.triangles[:, 0]]
    b = m.vertices[m.triangles[:, 1]]
    c = m.vertices[m.triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def mesh_surface_area(m: Mesh) -> float:
    return float(triangle_areas(m).sum())


def signed_volume(m: Mesh) -> float:
    """Sum of signed tetrahedron volumes; positive for outward winding."""
    if m.is_empty:
        return 0.0
    a = m.vertices[m.triangles[:, 0]]
    b = m.vertices[m.triangles[:, 1]]
    c = m.vertices[m.triangles[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def mesh_volume(m: Mesh) -> float:
    """Enclosed volume of a watertight mesh."""
    if not m.watertight:
        raise NonWatertight("volume requires a watertight mesh")
    return signed_volume(m)


def mesh_bbox(m: Mesh):
    if len(m.vertices) == 0:
        raise NonWatertight("empty mesh has no bounding box")
    return m.vertices.min(axis=0), m.vertices.max(axis=0)


def flip_winding(m: Mesh) -> Mesh:
    return Mesh(m.vertices, np.ascontiguousarray(m.triangles[:, ::-1]), m.watertight, m.quad_pairs)


def ensure_outward(m: Mesh) -> Mesh:
    """Repair inward winding (negative enclosed volume) by flipping faces."""
    if m.watertight and signed_volume(m) < 0:
        return flip_winding(m)
    return m


def transform_mesh(m: Mesh, t: SimilarityTransform) -> Mesh:
    """Apply scale, then rotation, then translation to every vertex.

    Positive scales preserve orientation and manifoldness, so the
    watertight flag carries over.
    """
    r = quat_to_matrix(t.rotation)
    v = (m.vertices * np.asarray(t.scale, dtype=float)) @ r.T + np.asarray(
        t.location, dtype=float
    )
    return Mesh(np.ascontiguousarray(v), m.triangles, m.watertight, m.quad_pairs)


def merge_meshes(meshes: list[Mesh]) -> Mesh:
    """Concatenate meshes into one vertex/index buffer (no boolean union).

    The merged mesh keeps watertight=True only when all inputs are
    watertight and their bounding boxes are pairwise disjoint (a
    conservative stand-in for an exact intersection test).
    """
    meshes = [m for m in meshes if not m.is_empty]
    if not meshes:
        return empty_mesh()
    offsets = np.cumsum([0] + [len(m.vertices) for m in meshes[:-1]])
    v = np.concatenate([m.vertices for m in meshes])
    t = np.concatenate([m.triangles + o for m, o in zip(meshes, offsets)])
    quad = None
    if all(m.quad_pairs is not None for m in meshes):
        toff = np.cumsum([0] + [len(m.triangles) for m in meshes[:-1]])
        quad = np.concatenate([m.quad_pairs + o for m, o in zip(meshes, toff)])
    wt = all(m.watertight for m in meshes)
    if wt and len(meshes) > 1:
        boxes = [mesh_bbox(m) for m in meshes]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                (lo1, hi1), (lo2, hi2) = boxes[i], boxes[j]
                if np.all(hi1 >= lo2) and np.all(hi2 >= lo1):
                    wt = False
                    break
            if not wt:
                break
    return Mesh(np.ascontiguousarray(v), np.ascontiguousarray(t), wt, quad)


def has_duplicate_vertices(m: Mesh, tol: float = WELD_TOL) -> bool:
    if len(m.vertices) == 0:
        return False
    keys = np.round(m.vertices / tol).astype(np.int64)
    return len(np.unique(keys, axis=0)) != len(m.vertices)
