"""Array replication of a prototype mesh along curves and across planes."""

from __future__ import annotations

import numpy as np

from ..dsl.types import SimilarityTransform
from ..errors import DegenerateBasis, GeometryError
from ..transforms import matrix_to_quat
from .curves import frames_at_fractions
from .mesh import Mesh, merge_meshes, transform_mesh


def array_1d(proto: Mesh, trajectory_spec, count: int) -> Mesh:
    """Instance the prototype at arc-length-equidistant trajectory points.

    Open curves place ``count`` instances from start to end inclusive;
    closed curves place them uniformly with the duplicate endpoint
    excluded. Each instance is oriented by the local frame (x -> normal,
    y -> binormal, z -> tangent). Instances are merged, not unioned.
    """
    if count < 1:
        raise GeometryError("array count must be >= 1")
    from ..dsl.types import trajectory_is_closed

    closed = trajectory_is_closed(trajectory_spec)
    if count == 1:
        fractions = np.array([0.0])
    elif closed:
        fractions = np.arange(count) / count
    else:
        fractions = np.arange(count) / (count - 1)
    frames = frames_at_fractions(trajectory_spec, fractions)
    instances = []
    for i in range(count):
        rot = np.column_stack([frames.normals[i], frames.binormals[i], frames.tangents[i]])
        t = SimilarityTransform(
            location=tuple(frames.positions[i]),
            rotation=matrix_to_quat(rot),
            scale=(1.0, 1.0, 1.0),
        )
        instances.append(transform_mesh(proto, t))
    return merge_meshes(instances)


def array_2d(proto: Mesh, basis_u, basis_v, counts, spacings) -> Mesh:
    """Instance the prototype on an (n, m) grid of offsets i*du*u + j*dv*v."""
    n, m = counts
    du, dv = spacings
    if n < 1 or m < 1:
        raise GeometryError("array counts must be >= 1")
    u = np.asarray(basis_u, dtype=float)
    v = np.asarray(basis_v, dtype=float)
    if np.linalg.norm(u) < 1e-12 or np.linalg.norm(v) < 1e-12 or np.linalg.norm(
        np.cross(u, v)
    ) < 1e-12:
        raise DegenerateBasis("array basis vectors must be linearly independent")
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    instances = []
    for i in range(n):
        for j in range(m):
            offset = i * du * u + j * dv * v
            t = SimilarityTransform(location=tuple(offset))
            instances.append(transform_mesh(proto, t))
    return merge_meshes(instances)
