"""Canonical unit primitives: cube, cylinder, uv_sphere, cone, torus.

Conventions (all centered at the origin):
  cube      spans [-1, 1]^3
  cylinder  radius 1, z in [-1, 1]
  uv_sphere radius 1
  cone      base radius 1 at z = -1, apex at z = +1
  torus     major radius 1 in the xy plane, minor radius 0.25 by default

Canonical meshes are cached per resolution; callers receive shared
immutable instances.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from ..dsl.types import PrimitiveKind
from ..errors import InvalidResolution
from .mesh import Mesh, make_mesh

_CUBE_VERTS = np.array(
    [
        [-1, -1, -1],
        [1, -1, -1],
        [1, 1, -1],
        [-1, 1, -1],
        [-1, -1, 1],
        [1, -1, 1],
        [1, 1, 1],
        [-1, 1, 1],
    ],
    dtype=float,
)

# outward-facing, CCW seen from outside; consecutive pairs form the 6 quads
_CUBE_TRIS = np.array(
    [
        [0, 2, 1],
        [0, 3, 2],  # z = -1
        [4, 5, 6],
        [4, 6, 7],  # z = +1
        [0, 1, 5],
        [0, 5, 4],  # y = -1
        [3, 7, 6],
        [3, 6, 2],  # y = +1
        [0, 4, 7],
        [0, 7, 3],  # x = -1
        [1, 2, 6],
        [1, 6, 5],  # x = +1
    ],
    dtype=np.int64,
)


def _ring(n: int, z: float, radius: float = 1.0) -> np.ndarray:
    ang = 2 * np.pi * np.arange(n) / n
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang), np.full(n, z)])


def _tube_quads(ring_a_start: int, ring_b_start: int, n: int):
    """Outward side quads between two rings (b above a), split into triangles."""
    tris = []
    pairs = []
    for j in range(n):
        j1 = (j + 1) % n
        a0, a1 = ring_a_start + j, ring_a_start + j1
        b0, b1 = ring_b_start + j, ring_b_start + j1
        tris.append([a0, a1, b1])
        tris.append([a0, b1, b0])
        pairs.append([len(tris) - 2, len(tris) - 1])
    return tris, pairs


def _cap_fan(center: int, ring_start: int, n: int, up: bool):
    tris = []
    for j in range(n):
        j1 = (j + 1) % n
        if up:
            tris.append([center, ring_start + j, ring_start + j1])
        else:
            tris.append([center, ring_start + j1, ring_start + j])
    return tris


@functools.lru_cache(maxsize=256)
def _cached_primitive(kind: PrimitiveKind) -> Mesh:
    name = kind.name
    if name == "cube":
        pairs = np.arange(12, dtype=np.int64).reshape(6, 2)
        return make_mesh(_CUBE_VERTS.copy(), _CUBE_TRIS.copy(), quad_pairs=pairs)

    if name == "cylinder":
        n = kind.segments
        if n < 3:
            raise InvalidResolution("cylinder needs segments >= 3")
        verts = np.concatenate([_ring(n, -1.0), _ring(n, 1.0), [[0, 0, -1.0], [0, 0, 1.0]]])
        side, pairs = _tube_quads(0, n, n)
        bottom = _cap_fan(2 * n, 0, n, up=False)
        top = _cap_fan(2 * n + 1, n, n, up=True)
        return make_mesh(verts, side + bottom + top, quad_pairs=np.array(pairs))

    if name == "cone":
        n = kind.segments
        if n < 3:
            raise InvalidResolution("cone needs segments >= 3")
        verts = np.concatenate([_ring(n, -1.0), [[0, 0, 1.0], [0, 0, -1.0]]])
        side = _cap_fan(n, 0, n, up=True)
        base = _cap_fan(n + 1, 0, n, up=False)
        return make_mesh(verts, side + base)

    if name == "uv_sphere":
        n, rings = kind.segments, kind.rings
        if n < 3 or rings < 3:
            raise InvalidResolution("uv_sphere needs segments >= 3 and rings >= 3")
        lats = np.pi * np.arange(1, rings) / rings  # polar angle, poles excluded
        ring_starts = []
        verts = []
        for lat in lats:
            ring_starts.append(len(verts))
            ring = _ring(n, math.cos(lat), radius=math.sin(lat))
            verts.extend(ring)
        south = len(verts)
        verts.append([0.0, 0.0, -1.0])
        north = len(verts)
        verts.append([0.0, 0.0, 1.0])
        tris = []
        pairs = []
        # lats descend in z (lat grows from ~0 to ~pi), so ring i+1 sits below i
        for i in range(len(ring_starts) - 1):
            quads, qp = _tube_quads(ring_starts[i + 1], ring_starts[i], n)
            pairs.extend([[len(tris) + a, len(tris) + b] for a, b in qp])
            tris.extend(quads)
        tris.extend(_cap_fan(north, ring_starts[0], n, up=True))
        tris.extend(_cap_fan(south, ring_starts[-1], n, up=False))
        return make_mesh(np.asarray(verts), tris, quad_pairs=np.array(pairs))

    if name == "torus":
        major_n, minor_n = kind.major_segments, kind.minor_segments
        r_minor = kind.minor_radius
        if major_n < 3 or minor_n < 3:
            raise InvalidResolution("torus needs major and minor segments >= 3")
        if r_minor <= 0:
            raise InvalidResolution("torus needs minor_radius > 0")
        theta = 2 * np.pi * np.arange(major_n) / major_n
        phi = 2 * np.pi * np.arange(minor_n) / minor_n
        th, ph = np.meshgrid(theta, phi, indexing="ij")
        radial = 1.0 + r_minor * np.cos(ph)
        verts = np.column_stack(
            [
                (radial * np.cos(th)).ravel(),
                (radial * np.sin(th)).ravel(),
                (r_minor * np.sin(ph)).ravel(),
            ]
        )
        tris = []
        pairs = []
        for i in range(major_n):
            i1 = (i + 1) % major_n
            for j in range(minor_n):
                j1 = (j + 1) % minor_n
                a = i * minor_n + j
                b = i * minor_n + j1
                c = i1 * minor_n + j1
                d = i1 * minor_n + j
                tris.append([a, d, c])
                tris.append([a, c, b])
                pairs.append([len(tris) - 2, len(tris) - 1])
        return make_mesh(verts, tris, quad_pairs=np.array(pairs))

    raise InvalidResolution(f"unknown primitive kind {name!r}")


def make_primitive(kind: PrimitiveKind) -> Mesh:
    return _cached_primitive(kind)
