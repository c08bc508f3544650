"""Part canonicalization, spatial ordering, and object-program emission.

Parts arrive as world-space meshes with semantic labels. Each part is
normalized into [-1, 1]^3 (its code is inferred there), the inferred code
is retargeted back to world space with the inverse transform, parts are
ordered bottom-to-top / left-to-right / front-to-back via characteristic
cells on a 32^3 grid anchored to the object's bounding box, and the object
program is emitted with semantic headers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .dsl import quantize_op, retarget_op
from .dsl.types import (
    Op,
    PartStatement,
    ShapeProgram,
    SimilarityTransform,
)
from .errors import DegenerateExtent, MissingCode, ShapeForgeError
from .geometry.execute import execute_op
from .geometry.mesh import Mesh, mesh_bbox, transform_mesh
from .metrics import chamfer_l2
from .pointcloud import PointCloud, sample_surface
from .transforms import invert, matrix_to_quat

GRID_RESOLUTION = 32
PART_FIT_THRESHOLD = 5e-3


@dataclass
class PartInstance:
    mesh: Mesh  # world space
    semantic_label: str
    inferred_code: Optional[Union[Op, PartStatement]] = None  # canonical space
    canonical_transform: Optional[SimilarityTransform] = None  # world -> canonical

    def code_op(self) -> Op:
        if self.inferred_code is None:
            raise MissingCode(self.semantic_label)
        if isinstance(self.inferred_code, PartStatement):
            return self.inferred_code.op
        return self.inferred_code


@dataclass(frozen=True, order=True)
class CharacteristicCell:
    """Grid cell ordered lexicographically as (z, x, y)."""

    iz: int
    ix: int
    iy: int


def canonicalize_part(mesh: Mesh, mode: str = "aabb") -> tuple[Mesh, SimilarityTransform]:
    """Map a part mesh into [-1, 1]^3; returns (canonical mesh, forward transform).

    ``aabb`` (default): identity rotation, uniform scale 2/longest-extent
    about the bbox center. ``pca``: rotate into the vertex principal frame
    first (deterministic sign convention), then scale the same way.
    """
    if mesh.is_empty or len(mesh.vertices) < 2:
        raise DegenerateExtent("cannot canonicalize an empty part")
    if mode == "aabb":
        rot = (1.0, 0.0, 0.0, 0.0)
        verts = mesh.vertices
    elif mode == "pca":
        centered = mesh.vertices - mesh.vertices.mean(axis=0)
        cov = centered.T @ centered
        _, vecs = np.linalg.eigh(cov)
        axes = vecs[:, ::-1]  # descending variance
        for k in range(3):
            if axes[np.argmax(np.abs(axes[:, k])), k] < 0:
                axes[:, k] = -axes[:, k]
        if np.linalg.det(axes) < 0:
            axes[:, 2] = -axes[:, 2]
        rot = matrix_to_quat(axes.T)  # world -> principal frame
        verts = mesh.vertices @ axes
    else:
        raise ValueError(f"unknown canonicalization mode {mode!r}")
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    extent = float((hi - lo).max())
    if extent <= 0:
        raise DegenerateExtent("part has zero extent")
    s = 2.0 / extent
    center = (lo + hi) / 2.0
    t = SimilarityTransform(location=tuple(-s * center), rotation=rot, scale=(s, s, s))
    return transform_mesh(mesh, t), t


def decanonicalize_code(
    code: Union[Op, PartStatement], t: SimilarityTransform
) -> Union[Op, PartStatement]:
    """Retarget canonical-space code back to world space (inverse of ``t``)."""
    inv = invert(t)
    if isinstance(code, PartStatement):
        return PartStatement(code.part_name, code.part_index, retarget_op(code.op, inv))
    return retarget_op(code, inv)


def _grid_geometry(object_bbox):
    lo = np.asarray(object_bbox[0], dtype=float)
    hi = np.asarray(object_bbox[1], dtype=float)
    ext = hi - lo
    if np.all(ext <= 0):
        raise DegenerateExtent("object bbox is degenerate")
    h = np.where(ext > 0, ext / GRID_RESOLUTION, 1.0)
    return lo, hi, h


def occupied_cells(mesh: Mesh, object_bbox) -> set[tuple[int, int, int]]:
    """Cells (ix, iy, iz) intersected by the part's triangles (conservative)."""
    from .metrics import _candidate_pairs, _triangle_box_overlap_pairs

    lo, hi, h = _grid_geometry(object_bbox)
    tri = mesh.vertices[mesh.triangles]
    tri_ids, cells = _candidate_pairs(tri, lo, h, GRID_RESOLUTION)
    if len(cells) == 0:
        return set()
    centers = lo + (cells + 0.5) * h
    hit = _triangle_box_overlap_pairs(tri[tri_ids], centers, (h / 2.0) * (1 + 1e-9))
    return {(int(c[0]), int(c[1]), int(c[2])) for c in cells[hit]}


def characteristic_cell(part: Union[PartInstance, Mesh], object_bbox) -> CharacteristicCell:
    """Occupied cell minimizing z, then x, then y."""
    mesh = part.mesh if isinstance(part, PartInstance) else part
    cells = occupied_cells(mesh, object_bbox)
    if not cells:
        raise ShapeForgeError("part occupies no grid cells")
    best = min((iz, ix, iy) for (ix, iy, iz) in cells)
    return CharacteristicCell(*best)


def order_parts(parts: list[PartInstance], object_bbox) -> list[int]:
    """Permutation sorting parts by characteristic cell; ties keep input order."""
    keyed = [
        (characteristic_cell(p, object_bbox), i) for i, p in enumerate(parts)
    ]
    keyed.sort(key=lambda ki: ki[0])  # stable: equal cells preserve input order
    return [i for _, i in keyed]


def assemble_object_program(
    parts: list[PartInstance], object_name: str, category: str = ""
) -> ShapeProgram:
    """Emit the object program from ordered, code-carrying parts.

    Every part needs inferred (canonical-space) code and its
    canonicalization transform; statements are decanonicalized, quantized
    to printable form, and indexed in the given order.
    """
    statements = []
    for index, part in enumerate(parts):
        op = part.code_op()
        if part.canonical_transform is not None:
            op = retarget_op(op, invert(part.canonical_transform))
        statements.append(PartStatement(part.semantic_label, index, quantize_op(op)))
    return ShapeProgram(object_name, category, statements)


@dataclass
class AcceptResult:
    accepted: bool
    cd: float
    reason: str = ""


def accept_part_fit(
    gt: PointCloud,
    predicted: Union[Op, PartStatement],
    threshold: float = PART_FIT_THRESHOLD,
) -> AcceptResult:
    """Accept a predicted part iff CD(gt, executed prediction) < threshold.

    Canonical-space protocol: both sides live in canonical space already
    (the caller normalizes the part before inference, and the predicted
    statement is canonical code). The prediction's mesh is sampled with
    the ground-truth cloud's count and seed, so a prediction that
    reproduces the part exactly scores CD == 0. The comparison is strict.
    """
    op = predicted.op if isinstance(predicted, PartStatement) else predicted
    try:
        mesh = execute_op(op)
        if mesh.is_empty:
            return AcceptResult(False, float("inf"), "prediction produced an empty mesh")
        seed = gt.seed if gt.seed is not None else 0
        pred_cloud = sample_surface(mesh, len(gt.points), seed)
        cd = chamfer_l2(gt.points, pred_cloud.points)
    except ShapeForgeError as exc:
        return AcceptResult(False, float("inf"), str(exc))
    if cd < threshold:
        return AcceptResult(True, cd)
    return AcceptResult(False, cd, f"cd {cd:.6g} >= {threshold:g}")


def object_bbox_of(parts: list[PartInstance]):
    los, his = zip(*(mesh_bbox(p.mesh) for p in parts))
    return tuple(np.min(los, axis=0)), tuple(np.max(his, axis=0))


def object_record(parts: list[PartInstance], program: ShapeProgram) -> dict:
    """JSONL-ready object record with per-part transforms and code."""
    from .dsl import format_op, print_program

    rows = []
    for part, stmt in zip(parts, program.parts):
        t = part.canonical_transform or SimilarityTransform()
        rows.append(
            {
                "label": part.semantic_label,
                "transform": {
                    "location": list(t.location),
                    "rotation": list(t.rotation),
                    "scale": list(t.scale),
                },
                "code": format_op(stmt.op),
            }
        )
    return {
        "object_name": program.object_name,
        "category": program.object_category,
        "parts": rows,
        "program_text": print_program(program),
    }
