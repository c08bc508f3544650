"""Lofting between placed closed loops by vertex correspondence."""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError, LoopCountMismatch
from ..geom2d import best_fit_plane, ear_clip
from .mesh import Mesh, ensure_outward, make_mesh

MIN_BRIDGE_SAMPLES = 32


def resample_loop(points: np.ndarray, k: int) -> np.ndarray:
    """Arc-length uniform resampling of a closed loop to k vertices.

    Sampling starts at the lexicographically smallest input vertex so the
    output is invariant under cyclic relabeling of the input.
    """
    p = np.asarray(points, dtype=float)
    n = len(p)
    if n < 3:
        raise LoopCountMismatch("loop needs at least 3 vertices")
    start = int(np.lexsort((p[:, 2], p[:, 1], p[:, 0]))[0])
    p = np.roll(p, -start, axis=0)
    closed = np.vstack([p, p[0]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total < 1e-12:
        raise GeometryError("degenerate loop (zero perimeter)")
    targets = total * np.arange(k) / k
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, n - 1)
    w = (targets - cum[idx]) / np.maximum(seg[idx], 1e-300)
    return closed[idx] * (1 - w[:, None]) + closed[idx + 1] * w[:, None]


def _align(prev: np.ndarray, loop: np.ndarray) -> np.ndarray:
    """Cyclic shift (and possible reversal) minimizing total squared edge length."""
    k = len(loop)
    best = None
    best_energy = np.inf
    for candidate in (loop, loop[::-1]):
        for shift in range(k):
            rolled = np.roll(candidate, -shift, axis=0)
            energy = float(np.sum((rolled - prev) ** 2))
            if energy < best_energy - 1e-15:
                best_energy = energy
                best = rolled
    return best


def bridge_loops(loops, cap_start: bool = True, cap_end: bool = True) -> Mesh:
    """Join corresponding vertices of consecutive loops into a tube.

    All loops are resampled to max(input counts, 32) vertices; each loop's
    correspondence to its predecessor is the cyclic shift (allowing
    reversal) of minimum energy, which makes the output independent of the
    input vertex labeling. Caps are ear-clipped on the end loops'
    best-fit planes. Watertight when both caps are requested.
    """
    if len(loops) < 2:
        raise LoopCountMismatch("bridge needs at least 2 loops")
    k = max(max(len(l) for l in loops), MIN_BRIDGE_SAMPLES)
    resampled = [resample_loop(np.asarray(l, dtype=float), k) for l in loops]
    aligned = [resampled[0]]
    for loop in resampled[1:]:
        aligned.append(_align(aligned[-1], loop))
    rings = np.stack(aligned)

    verts = rings.reshape(-1, 3)
    tris: list[list[int]] = []
    pairs: list[list[int]] = []
    for i in range(len(rings) - 1):
        base, nxt = i * k, (i + 1) * k
        for j in range(k):
            j1 = (j + 1) % k
            tris.append([base + j, base + j1, nxt + j1])
            tris.append([base + j, nxt + j1, nxt + j])
            pairs.append([len(tris) - 2, len(tris) - 1])

    # caps must traverse their ring opposite to the adjacent side-wall edges,
    # so the closed surface winds consistently; ensure_outward fixes the sign
    for flag, ring_idx, order in (
        (cap_start, 0, np.arange(k)[::-1]),
        (cap_end, len(rings) - 1, np.arange(k)),
    ):
        if not flag:
            continue
        ring = rings[ring_idx][order]
        centroid, normal, e1, e2 = best_fit_plane(ring)
        uv = np.column_stack([(ring - centroid) @ e1, (ring - centroid) @ e2])
        area2 = float(
            0.5
            * np.sum(uv[:, 0] * np.roll(uv[:, 1], -1) - np.roll(uv[:, 0], -1) * uv[:, 1])
        )
        if abs(area2) < 1e-12:
            raise GeometryError("cannot cap a degenerate loop")
        if area2 < 0:
            uv = uv * np.array([-1.0, 1.0])  # mirror for ear_clip's CCW requirement
        cap = ear_clip(uv)
        off = ring_idx * k
        for a, b, c in cap:
            tris.append([off + order[a], off + order[b], off + order[c]])

    mesh = make_mesh(verts, tris, quad_pairs=np.array(pairs), weld=False)
    if mesh.watertight:
        from .mesh import signed_volume

        if abs(signed_volume(mesh)) < 1e-10:
            raise GeometryError("degenerate bridge: coincident loops enclose no volume")
    return ensure_outward(mesh)
