"""Surface point sampling, unit-cube normalization, and augmentation.

Randomness comes from the counter-based Philox generator keyed by an
explicit seed, so clouds are reproducible across platforms and thread
counts. Draws are laid out so that sampling n points is a prefix of
sampling m > n points with the same seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dsl.types import SimilarityTransform
from .errors import DegenerateExtent, EmptyMesh
from .geometry.io import load_ply, save_ply_points
from .geometry.mesh import Mesh, triangle_areas
from .prng import rng_for_seed
from .transforms import quat_to_matrix, transform_points


@dataclass
class PointCloud:
    points: np.ndarray  # (n, 3) float64
    source_id: str = ""
    seed: Optional[int] = None
    applied_transform: Optional[SimilarityTransform] = field(default=None)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class AugmentConfig:
    rotation: bool = True
    scale_range: tuple[float, float] = (0.8, 1.2)
    point_count_range: tuple[int, int] = (4096, 16384)
    # training-noise amplitude; value is a configuration default, not pinned
    noise_sigma: float = 0.005

    def __post_init__(self):
        lo, hi = self.scale_range
        if lo > hi or lo <= 0:
            raise ValueError("scale_range must satisfy 0 < lo <= hi")
        clo, chi = self.point_count_range
        if not (1 <= clo <= chi <= 2**20):
            raise ValueError("point_count_range must lie within [1, 2^20]")


def sample_surface(mesh: Mesh, n: int, seed: int, source_id: str = "") -> PointCloud:
    """Area-weighted uniform surface samples; deterministic under seed."""
    if mesh.is_empty:
        raise EmptyMesh("cannot sample an empty mesh")
    if n < 1:
        raise ValueError("n must be >= 1")
    areas = triangle_areas(mesh)
    total = areas.sum()
    if total <= 0:
        raise EmptyMesh("mesh has zero surface area")
    cum = np.cumsum(areas)
    rng = rng_for_seed(seed)
    draws = rng.random((n, 3))  # one block: prefix property over n
    tri_idx = np.searchsorted(cum, draws[:, 0] * total, side="right")
    tri_idx = np.minimum(tri_idx, len(areas) - 1)
    a = mesh.vertices[mesh.triangles[tri_idx, 0]]
    b = mesh.vertices[mesh.triangles[tri_idx, 1]]
    c = mesh.vertices[mesh.triangles[tri_idx, 2]]
    r1 = np.sqrt(draws[:, 1])[:, None]
    r2 = draws[:, 2][:, None]
    pts = (1 - r1) * a + r1 * (1 - r2) * b + r1 * r2 * c
    return PointCloud(pts, source_id=source_id, seed=seed)


def normalize_to_unit_cube(pc: PointCloud) -> tuple[PointCloud, SimilarityTransform]:
    """Map the cloud into [-1, 1]^3 by a uniform scale about the bbox center.

    Returns the forward transform t with t(original) == normalized:
    scale s = 2 / longest extent, translation -s * center, identity
    rotation. The longest axis spans exactly [-1, 1].
    """
    if len(pc.points) < 2:
        raise DegenerateExtent("normalization needs at least 2 points")
    lo = pc.points.min(axis=0)
    hi = pc.points.max(axis=0)
    extent = float((hi - lo).max())
    if extent <= 0:
        raise DegenerateExtent("cloud has zero extent")
    s = 2.0 / extent
    center = (lo + hi) / 2.0
    t = SimilarityTransform(location=tuple(-s * center), scale=(s, s, s))
    out = transform_points(pc.points, t)
    return (
        PointCloud(out, source_id=pc.source_id, seed=pc.seed, applied_transform=t),
        t,
    )


def _random_unit_quaternion(rng: np.random.Generator) -> tuple:
    u1, u2, u3 = rng.random(3)
    a, b = math.sqrt(1 - u1), math.sqrt(u1)
    return (
        a * math.sin(2 * math.pi * u2),
        a * math.cos(2 * math.pi * u2),
        b * math.sin(2 * math.pi * u3),
        b * math.cos(2 * math.pi * u3),
    )


def augment(pc: PointCloud, cfg: AugmentConfig, seed: int) -> PointCloud:
    """Random rotation and scale, point-count resampling, Gaussian jitter."""
    rng = rng_for_seed(seed, stream=1)
    pts = pc.points
    if cfg.rotation:
        q = _random_unit_quaternion(rng)
        pts = pts @ quat_to_matrix(q).T
    lo, hi = cfg.scale_range
    if (lo, hi) != (1.0, 1.0):
        pts = pts * rng.uniform(lo, hi)
    clo, chi = cfg.point_count_range
    target = int(rng.integers(clo, chi + 1))
    n = len(pts)
    if target < n:
        keep = rng.choice(n, size=target, replace=False)
        pts = pts[np.sort(keep)]
    elif target > n:
        extra = rng.integers(0, n, size=target - n)
        pts = np.concatenate([pts, pts[extra]])
    if cfg.noise_sigma > 0:
        pts = pts + rng.normal(0.0, cfg.noise_sigma, size=pts.shape)
    return PointCloud(np.ascontiguousarray(pts), source_id=pc.source_id, seed=seed)


def save_cloud(path, pc: PointCloud) -> None:
    comments = [f"source {pc.source_id or 'unknown'}"]
    if pc.seed is not None:
        comments.append(f"seed {pc.seed}")
    save_ply_points(path, pc.points, comments)


def load_cloud(path) -> PointCloud:
    verts, tris, comments = load_ply(path)
    if tris is not None:
        raise ValueError(f"{path} is a mesh, not a point cloud")
    source = ""
    seed = None
    for c in comments:
        if c.startswith("source "):
            source = c[len("source ") :]
        elif c.startswith("seed "):
            seed = int(c[len("seed ") :])
    return PointCloud(verts, source_id=source, seed=seed)
