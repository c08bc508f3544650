"""Execution of shape-program statements into meshes."""

from __future__ import annotations

import numpy as np

from ..dsl.types import (
    Array1DOp,
    Array2DOp,
    BooleanOp,
    BridgeLoopOp,
    FillGridOp,
    Op,
    PlacedSection,
    PrimitiveOp,
    RevolveOp,
    ShapeProgram,
    SimilarityTransform,
    TranslationOp,
)
from ..errors import ExecutionError, ShapeForgeError
from ..transforms import quat_to_matrix
from .arrays import array_1d, array_2d
from .bridge import bridge_loops
from .csg import boolean_many
from .curves import ScaleProfile, eval_section
from .fill import fill_grid
from .mesh import Mesh, transform_mesh
from .primitives import make_primitive
from .sweep import revolve, sweep


def _placed_loop(p: PlacedSection) -> np.ndarray:
    """Evaluate a placed section to a closed 3D polyline."""
    pts2d = eval_section(p.section)
    r = quat_to_matrix(p.rotation)
    local = np.column_stack([pts2d * p.scale, np.zeros(len(pts2d))])
    return local @ r.T + np.asarray(p.location, dtype=float)


def execute_op(op: Op) -> Mesh:
    """Build the op's mesh in local coordinates, then apply its transform."""
    if isinstance(op, PrimitiveOp):
        local = make_primitive(op.kind)
    elif isinstance(op, TranslationOp):
        local = sweep(
            op.section, op.trajectory, ScaleProfile.from_pairs(op.scale_profile)
        )
    elif isinstance(op, RevolveOp):
        local = revolve(
            op.section,
            offset=op.offset,
            axis_point=op.axis_point,
            axis_dir=op.axis_dir,
            angle=op.angle,
            steps=op.steps,
        )
    elif isinstance(op, BridgeLoopOp):
        loops = [_placed_loop(p) for p in op.loops]
        local = bridge_loops(loops, op.cap_start, op.cap_end)
    elif isinstance(op, BooleanOp):
        operands = [execute_op(o) for o in op.operands]
        local = boolean_many(operands, op.op)
    elif isinstance(op, Array1DOp):
        local = array_1d(execute_op(op.proto), op.trajectory, op.count)
    elif isinstance(op, Array2DOp):
        local = array_2d(
            execute_op(op.proto), op.basis_u, op.basis_v, op.counts, op.spacings
        )
    elif isinstance(op, FillGridOp):
        local = fill_grid(op.boundary, op.thickness)
    else:
        raise ShapeForgeError(f"cannot execute op {op!r}")
    if op.transform == SimilarityTransform():
        return local
    return transform_mesh(local, op.transform)


def execute_program(p: ShapeProgram) -> list[tuple[str, Mesh]]:
    """One mesh per part, in program order; deterministic.

    The first failing part aborts with :class:`ExecutionError` carrying
    its index.
    """
    out: list[tuple[str, Mesh]] = []
    for part in p.parts:
        try:
            out.append((part.part_name, execute_op(part.op)))
        except ShapeForgeError as exc:
            raise ExecutionError(part.part_index, exc) from exc
    return out
