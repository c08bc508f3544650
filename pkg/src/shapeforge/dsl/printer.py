"""Canonical pretty-printer for shape programs.

Printing is deterministic: a fixed keyword order per statement, every
parameter written explicitly, floats in shortest 6-significant-digit form,
one statement per line, LF line endings. ``parse_program(print_program(p))``
reproduces ``p`` whenever ``p`` holds canonical floats (everything produced
by the parser, the sampler, or the assembler does).
"""

from __future__ import annotations

from .types import (
    ArcSection,
    ArcTrajectory,
    Array1DOp,
    Array2DOp,
    BezierSection,
    BezierTrajectory,
    BooleanOp,
    BridgeLoopOp,
    CircleSection,
    CircleTrajectory,
    FillGridOp,
    LineTrajectory,
    Op,
    PlacedSection,
    PolygonSection,
    PolylineTrajectory,
    PrimitiveOp,
    RectangleSection,
    RectangleTrajectory,
    RevolveOp,
    ShapeProgram,
    TranslationOp,
    format_number,
)


def _value(v) -> str:
    if isinstance(v, str):
        return "'" + v + "'"
    if isinstance(v, bool) or isinstance(v, (int, float)):
        return format_number(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(_value(x) for x in v) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(_value(x) for x in v) + "]"
    raise TypeError(f"unprintable value: {v!r}")


def _call(fname: str, kwargs: list[tuple[str, str]]) -> str:
    inner = ", ".join(f"{k}={v}" for k, v in kwargs)
    return f"{fname}({inner})"


def _section_kwargs(s) -> list[tuple[str, str]]:
    if isinstance(s, RectangleSection):
        return [
            ("type", "'rectangle'"),
            ("width", _value(s.width)),
            ("height", _value(s.height)),
        ]
    if isinstance(s, CircleSection):
        return [
            ("type", "'circle'"),
            ("radius", _value(s.radius)),
            ("resolution", _value(s.resolution)),
        ]
    if isinstance(s, ArcSection):
        return [
            ("type", "'arc'"),
            ("radius", _value(s.radius)),
            ("start_angle", _value(s.start_angle)),
            ("end_angle", _value(s.end_angle)),
            ("chord_closed", _value(s.chord_closed)),
            ("resolution", _value(s.resolution)),
        ]
    if isinstance(s, PolygonSection):
        return [("type", "'polygon'"), ("points", _value(list(s.points)))]
    if isinstance(s, BezierSection):
        return [
            ("type", "'bezier'"),
            ("points", _value(list(s.points))),
            ("closed", _value(s.closed)),
            ("resolution", _value(s.resolution)),
        ]
    raise TypeError(f"not a section: {s!r}")


def format_section(s) -> str:
    return _call("create_curve", _section_kwargs(s))


def format_trajectory(t) -> str:
    if isinstance(t, LineTrajectory):
        kw = [("type", "'line'"), ("start", _value(t.start)), ("end", _value(t.end))]
    elif isinstance(t, PolylineTrajectory):
        kw = [("type", "'polyline'"), ("points", _value(list(t.points)))]
    elif isinstance(t, CircleTrajectory):
        kw = [
            ("type", "'circle'"),
            ("center", _value(t.center)),
            ("axis", _value(t.axis)),
            ("radius", _value(t.radius)),
            ("resolution", _value(t.resolution)),
        ]
    elif isinstance(t, ArcTrajectory):
        kw = [
            ("type", "'arc'"),
            ("center", _value(t.center)),
            ("axis", _value(t.axis)),
            ("radius", _value(t.radius)),
            ("start_angle", _value(t.start_angle)),
            ("end_angle", _value(t.end_angle)),
            ("resolution", _value(t.resolution)),
        ]
    elif isinstance(t, RectangleTrajectory):
        kw = [
            ("type", "'rectangle'"),
            ("center", _value(t.center)),
            ("axis_u", _value(t.axis_u)),
            ("axis_v", _value(t.axis_v)),
            ("width", _value(t.width)),
            ("height", _value(t.height)),
        ]
    elif isinstance(t, BezierTrajectory):
        kw = [
            ("type", "'bezier'"),
            ("points", _value(list(t.points))),
            ("resolution", _value(t.resolution)),
        ]
    else:
        raise TypeError(f"not a trajectory: {t!r}")
    return _call("create_curve", kw)


def format_placed_section(p: PlacedSection) -> str:
    kw = _section_kwargs(p.section)
    kw += [
        ("location", _value(p.location)),
        ("rotation", _value(p.rotation)),
        ("scale", _value(p.scale)),
    ]
    return _call("create_curve", kw)


def _transform_kwargs(op) -> list[tuple[str, str]]:
    t = op.transform
    return [
        ("location", _value(t.location)),
        ("rotation", _value(t.rotation)),
        ("scale", _value(t.scale)),
    ]


def format_op(op: Op) -> str:
    if isinstance(op, PrimitiveOp):
        k = op.kind
        kw = [("kind", f"'{k.name}'")]
        if k.name in ("cylinder", "cone"):
            kw.append(("segments", _value(k.segments)))
        elif k.name == "uv_sphere":
            kw.append(("segments", _value(k.segments)))
            kw.append(("rings", _value(k.rings)))
        elif k.name == "torus":
            kw.append(("major_segments", _value(k.major_segments)))
            kw.append(("minor_segments", _value(k.minor_segments)))
            kw.append(("minor_radius", _value(k.minor_radius)))
        return _call("create_primitive", kw + _transform_kwargs(op))
    if isinstance(op, TranslationOp):
        kw = [
            ("section", format_section(op.section)),
            ("trajectory", format_trajectory(op.trajectory)),
            ("scale_profile", _value([tuple(k) for k in op.scale_profile])),
        ]
        return _call("translation", kw + _transform_kwargs(op))
    if isinstance(op, RevolveOp):
        kw = [
            ("section", format_section(op.section)),
            ("offset", _value(op.offset)),
            ("axis_point", _value(op.axis_point)),
            ("axis_dir", _value(op.axis_dir)),
            ("angle", _value(op.angle)),
            ("steps", _value(op.steps)),
        ]
        return _call("revolve", kw + _transform_kwargs(op))
    if isinstance(op, BridgeLoopOp):
        loops = "[" + ", ".join(format_placed_section(l) for l in op.loops) + "]"
        kw = [
            ("loops", loops),
            ("cap_start", _value(op.cap_start)),
            ("cap_end", _value(op.cap_end)),
        ]
        return _call("bridge_loop", kw + _transform_kwargs(op))
    if isinstance(op, BooleanOp):
        operands = "[" + ", ".join(format_op(o) for o in op.operands) + "]"
        kw = [("op", f"'{op.op}'"), ("operands", operands)]
        return _call("boolean", kw + _transform_kwargs(op))
    if isinstance(op, Array1DOp):
        kw = [
            ("proto", format_op(op.proto)),
            ("trajectory", format_trajectory(op.trajectory)),
            ("count", _value(op.count)),
        ]
        return _call("array_1d", kw + _transform_kwargs(op))
    if isinstance(op, Array2DOp):
        kw = [
            ("proto", format_op(op.proto)),
            ("basis_u", _value(op.basis_u)),
            ("basis_v", _value(op.basis_v)),
            ("counts", _value(op.counts)),
            ("spacings", _value(op.spacings)),
        ]
        return _call("array_2d", kw + _transform_kwargs(op))
    if isinstance(op, FillGridOp):
        kw = [
            ("boundary", _value(list(op.boundary))),
            ("thickness", _value(op.thickness)),
        ]
        return _call("fill_grid", kw + _transform_kwargs(op))
    raise TypeError(f"not an op: {op!r}")


def print_program(p: ShapeProgram) -> str:
    """Render a program to canonical text. Pure: identical ASTs give identical bytes."""
    lines = [f"# object: {p.object_name}"]
    if p.object_category:
        lines.append(f"# category: {p.object_category}")
    for part in p.parts:
        lines.append(f"# part_{part.part_index}: {part.part_name}")
        lines.append(format_op(part.op))
    return "\n".join(lines) + "\n"
