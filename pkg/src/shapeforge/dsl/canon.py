"""Canonicalization of AST numbers to their printable 6-significant-digit form."""

from __future__ import annotations

import dataclasses

from .types import Op, PartStatement, ShapeProgram, canonical_float


def _q(v):
    if isinstance(v, bool) or isinstance(v, (int, str)) or v is None:
        return v
    if isinstance(v, float):
        return canonical_float(v)
    if isinstance(v, tuple):
        return tuple(_q(x) for x in v)
    if dataclasses.is_dataclass(v):
        return dataclasses.replace(
            v, **{f.name: _q(getattr(v, f.name)) for f in dataclasses.fields(v)}
        )
    raise TypeError(f"cannot canonicalize {v!r}")


def quantize_op(op: Op) -> Op:
    """Round every float parameter so printing and parsing is lossless."""
    return _q(op)


def quantize_statement(s: PartStatement) -> PartStatement:
    return PartStatement(s.part_name, s.part_index, quantize_op(s.op))


def quantize_program(p: ShapeProgram) -> ShapeProgram:
    return ShapeProgram(
        p.object_name, p.object_category, [quantize_statement(s) for s in p.parts]
    )
