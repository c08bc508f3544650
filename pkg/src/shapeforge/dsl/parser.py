"""Parser for shape-program source text.

Grammar (UTF-8, LF line endings)::

    program   := object_header category_header? part*
    object_header   := "#" "object:" NAME
    category_header := "#" "category:" NAME
    part      := part_header stmt
    part_header := "#" "part_" INT ":" NAME
    stmt      := FNAME "(" kwarg ("," kwarg)* ")"
    kwarg     := IDENT "=" value
    value     := number | string | bool | tuple | list | stmt

Header comments carrying object/part names are parsed into semantic fields;
any other comment line is discarded. Statements may span multiple lines
(the printer emits one line per statement, but the grammar does not require
it). The first syntax violation raises :class:`ParseError`; type-invariant
violations found after a successful parse raise :class:`ValidationError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError, ValidationError
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
    Diagnostic,
    FillGridOp,
    LineTrajectory,
    Op,
    PartStatement,
    PlacedSection,
    PolygonSection,
    PolylineTrajectory,
    PrimitiveKind,
    PrimitiveOp,
    RectangleSection,
    RectangleTrajectory,
    RevolveOp,
    ShapeProgram,
    SimilarityTransform,
    TranslationOp,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<comment>\#[^\n]*)
  | (?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'(?:[^'\\\n]|\\.)*')
  | (?P<punct>[()\[\],=])
  | (?P<ws>[ \t\r\n]+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)

_OBJECT_HEADER = re.compile(r"^#\s*object:\s*(.+?)\s*$")
_CATEGORY_HEADER = re.compile(r"^#\s*category:\s*(.+?)\s*$")
_PART_HEADER = re.compile(r"^#\s*part_(\d+):\s*(.+?)\s*$")


@dataclass
class _Token:
    kind: str  # comment | number | name | string | punct | eof
    text: str
    line: int
    col: int

    @property
    def span(self):
        return ((self.line, self.col), (self.line, self.col + max(len(self.text), 1) - 1))


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        kind = m.lastgroup
        raw = m.group()
        if kind == "bad":
            raise ParseError(
                Diagnostic("error", ((line, col), (line, col)), f"unexpected character {raw!r}")
            )
        if kind != "ws":
            tokens.append(_Token(kind, raw, line, col))
        nl = raw.count("\n")
        if nl:
            line += nl
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ParseError(Diagnostic("error", tok.span, message))

    def expect_punct(self, ch: str) -> _Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != ch:
            self.fail(f"expected {ch!r}, found {tok.text!r}" if tok.text else f"expected {ch!r}")
        return self.next()

    # -- values --------------------------------------------------------------

    def parse_value(self):
        tok = self.peek()
        if tok.kind == "number":
            self.next()
            return _to_number(tok.text)
        if tok.kind == "string":
            self.next()
            return tok.text[1:-1].replace("\\'", "'")
        if tok.kind == "name":
            if tok.text == "True":
                self.next()
                return True
            if tok.text == "False":
                self.next()
                return False
            return self.parse_call()
        if tok.kind == "punct" and tok.text == "(":
            return self.parse_seq("(", ")", tuple)
        if tok.kind == "punct" and tok.text == "[":
            return self.parse_seq("[", "]", list)
        self.fail(f"expected a value, found {tok.text!r}" if tok.text else "expected a value")

    def parse_seq(self, open_ch, close_ch, factory):
        self.expect_punct(open_ch)
        items = []
        if self.peek().kind == "punct" and self.peek().text == close_ch:
            self.next()
            return factory(items)
        while True:
            items.append(self.parse_value())
            tok = self.peek()
            if tok.kind == "punct" and tok.text == ",":
                self.next()
                continue
            if tok.kind == "punct" and tok.text == close_ch:
                self.next()
                return factory(items)
            self.fail(f"expected ',' or {close_ch!r}")

    def parse_call(self) -> "_Call":
        name_tok = self.peek()
        if name_tok.kind != "name":
            self.fail("expected a function name")
        self.next()
        self.expect_punct("(")
        kwargs: dict[str, object] = {}
        spans: dict[str, tuple] = {}
        if self.peek().kind == "punct" and self.peek().text == ")":
            end = self.next()
        else:
            while True:
                key_tok = self.peek()
                if key_tok.kind != "name":
                    self.fail("expected a keyword argument name")
                self.next()
                self.expect_punct("=")
                if key_tok.text in kwargs:
                    self.fail(f"duplicate keyword {key_tok.text!r}", key_tok)
                kwargs[key_tok.text] = self.parse_value()
                spans[key_tok.text] = key_tok.span
                tok = self.peek()
                if tok.kind == "punct" and tok.text == ",":
                    self.next()
                    continue
                if tok.kind == "punct" and tok.text == ")":
                    end = self.next()
                    break
                self.fail("expected ',' or ')'")
        return _Call(name_tok.text, kwargs, spans, name_tok.span[0], end.span[1])


def _to_number(text: str):
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    return float(text)


@dataclass
class _Call:
    fname: str
    kwargs: dict
    kwarg_spans: dict
    start: tuple
    end: tuple

    @property
    def span(self):
        return (self.start, self.end)

    def arg_span(self, key):
        return ((self.kwarg_spans.get(key, self.start), self.kwarg_spans.get(key, self.end))
                if key in self.kwarg_spans else self.span)


# --- typed extraction helpers -------------------------------------------------


def _err(call: _Call, msg: str):
    raise ParseError(Diagnostic("error", call.span, f"{call.fname}: {msg}"))


def _take(call: _Call, key, default=_err):
    if key in call.kwargs:
        return call.kwargs.pop(key)
    if default is _err:
        _err(call, f"missing required argument {key!r}")
    return default


def _float(call, key, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _err(call, f"argument {key!r} must be a number")
    return float(v)


def _int(call, key, v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _err(call, f"argument {key!r} must be an integer")
    return v


def _bool(call, key, v) -> bool:
    if not isinstance(v, bool):
        _err(call, f"argument {key!r} must be True or False")
    return v


def _vec(call, key, v, n) -> tuple:
    if not isinstance(v, tuple) or len(v) != n or any(
        isinstance(x, bool) or not isinstance(x, (int, float)) for x in v
    ):
        _err(call, f"argument {key!r} must be a tuple of {n} numbers")
    return tuple(float(x) for x in v)


def _point_list(call, key, v, dim) -> tuple:
    if not isinstance(v, list) or not v:
        _err(call, f"argument {key!r} must be a non-empty list of points")
    return tuple(_vec(call, key, p, dim) for p in v)


def _transform_from(call: _Call) -> SimilarityTransform:
    loc = _vec(call, "location", _take(call, "location", (0, 0, 0)), 3)
    rot = _vec(call, "rotation", _take(call, "rotation", (1, 0, 0, 0)), 4)
    scale = _vec(call, "scale", _take(call, "scale", (1, 1, 1)), 3)
    return SimilarityTransform(loc, rot, scale)


def _finish(call: _Call):
    if call.kwargs:
        key = next(iter(call.kwargs))
        _err(call, f"unknown argument {key!r}")


# --- curve builders -----------------------------------------------------------


def _build_section(call: _Call):
    if call.fname != "create_curve":
        _err(call, "expected create_curve(...) for a section")
    ctype = _take(call, "type")
    if ctype == "rectangle":
        s = RectangleSection(
            width=_float(call, "width", _take(call, "width")),
            height=_float(call, "height", _take(call, "height")),
        )
    elif ctype == "circle":
        s = CircleSection(
            radius=_float(call, "radius", _take(call, "radius")),
            resolution=_int(call, "resolution", _take(call, "resolution", 32)),
        )
    elif ctype == "arc":
        s = ArcSection(
            radius=_float(call, "radius", _take(call, "radius")),
            start_angle=_float(call, "start_angle", _take(call, "start_angle")),
            end_angle=_float(call, "end_angle", _take(call, "end_angle")),
            chord_closed=_bool(call, "chord_closed", _take(call, "chord_closed", True)),
            resolution=_int(call, "resolution", _take(call, "resolution", 24)),
        )
    elif ctype == "polygon":
        s = PolygonSection(points=_point_list(call, "points", _take(call, "points"), 2))
    elif ctype == "bezier":
        s = BezierSection(
            points=_point_list(call, "points", _take(call, "points"), 2),
            closed=_bool(call, "closed", _take(call, "closed", True)),
            resolution=_int(call, "resolution", _take(call, "resolution", 12)),
        )
    else:
        _err(call, f"unknown section type {ctype!r}")
    return s


def _build_placed_section(call: _Call) -> PlacedSection:
    loc = _vec(call, "location", _take(call, "location", (0, 0, 0)), 3)
    rot = _vec(call, "rotation", _take(call, "rotation", (1, 0, 0, 0)), 4)
    raw_scale = _take(call, "scale", 1.0)
    scale = _float(call, "scale", raw_scale)
    section = _build_section(call)
    _finish(call)
    return PlacedSection(section=section, location=loc, rotation=rot, scale=scale)


def _build_trajectory(call: _Call):
    if call.fname != "create_curve":
        _err(call, "expected create_curve(...) for a trajectory")
    ctype = _take(call, "type")
    if ctype == "line":
        t = LineTrajectory(
            start=_vec(call, "start", _take(call, "start"), 3),
            end=_vec(call, "end", _take(call, "end"), 3),
        )
    elif ctype == "polyline":
        t = PolylineTrajectory(points=_point_list(call, "points", _take(call, "points"), 3))
    elif ctype == "circle":
        t = CircleTrajectory(
            center=_vec(call, "center", _take(call, "center"), 3),
            axis=_vec(call, "axis", _take(call, "axis"), 3),
            radius=_float(call, "radius", _take(call, "radius")),
            resolution=_int(call, "resolution", _take(call, "resolution", 64)),
        )
    elif ctype == "arc":
        t = ArcTrajectory(
            center=_vec(call, "center", _take(call, "center"), 3),
            axis=_vec(call, "axis", _take(call, "axis"), 3),
            radius=_float(call, "radius", _take(call, "radius")),
            start_angle=_float(call, "start_angle", _take(call, "start_angle")),
            end_angle=_float(call, "end_angle", _take(call, "end_angle")),
            resolution=_int(call, "resolution", _take(call, "resolution", 48)),
        )
    elif ctype == "rectangle":
        t = RectangleTrajectory(
            center=_vec(call, "center", _take(call, "center"), 3),
            axis_u=_vec(call, "axis_u", _take(call, "axis_u"), 3),
            axis_v=_vec(call, "axis_v", _take(call, "axis_v"), 3),
            width=_float(call, "width", _take(call, "width")),
            height=_float(call, "height", _take(call, "height")),
        )
    elif ctype == "bezier":
        t = BezierTrajectory(
            points=_point_list(call, "points", _take(call, "points"), 3),
            resolution=_int(call, "resolution", _take(call, "resolution", 16)),
        )
    else:
        _err(call, f"unknown trajectory type {ctype!r}")
    _finish(call)
    return t


def _expect_call(call: _Call, key, v) -> _Call:
    if not isinstance(v, _Call):
        _err(call, f"argument {key!r} must be a nested call")
    return v


# --- op builders ---------------------------------------------------------------


def build_op(call: _Call) -> Op:
    f = call.fname
    if f == "create_primitive":
        name = _take(call, "kind")
        if name not in ("cube", "cylinder", "uv_sphere", "cone", "torus"):
            _err(call, f"unknown primitive kind {name!r}")
        kind_kwargs = {}
        if name in ("cylinder", "cone"):
            kind_kwargs["segments"] = _int(call, "segments", _take(call, "segments", 32))
        elif name == "uv_sphere":
            kind_kwargs["segments"] = _int(call, "segments", _take(call, "segments", 32))
            kind_kwargs["rings"] = _int(call, "rings", _take(call, "rings", 16))
        elif name == "torus":
            kind_kwargs["major_segments"] = _int(
                call, "major_segments", _take(call, "major_segments", 48)
            )
            kind_kwargs["minor_segments"] = _int(
                call, "minor_segments", _take(call, "minor_segments", 12)
            )
            kind_kwargs["minor_radius"] = _float(
                call, "minor_radius", _take(call, "minor_radius", 0.25)
            )
        transform = _transform_from(call)
        _finish(call)
        return PrimitiveOp(kind=PrimitiveKind(name, **kind_kwargs), transform=transform)

    if f == "translation":
        section = _build_section(_expect_call(call, "section", _take(call, "section")))
        trajectory = _build_trajectory(
            _expect_call(call, "trajectory", _take(call, "trajectory"))
        )
        raw_profile = _take(call, "scale_profile", [(0, 1), (1, 1)])
        if not isinstance(raw_profile, list) or not raw_profile:
            _err(call, "scale_profile must be a list of (t, s) pairs")
        profile = tuple(_vec(call, "scale_profile", p, 2) for p in raw_profile)
        transform = _transform_from(call)
        _finish(call)
        return TranslationOp(
            section=section, trajectory=trajectory, scale_profile=profile, transform=transform
        )

    if f == "revolve":
        section = _build_section(_expect_call(call, "section", _take(call, "section")))
        offset = _vec(call, "offset", _take(call, "offset", (0, 0)), 2)
        axis_point = _vec(call, "axis_point", _take(call, "axis_point", (0, 0, 0)), 3)
        axis_dir = _vec(call, "axis_dir", _take(call, "axis_dir", (0, 0, 1)), 3)
        angle = _float(call, "angle", _take(call, "angle", 6.28319))
        steps = _int(call, "steps", _take(call, "steps", 64))
        transform = _transform_from(call)
        _finish(call)
        return RevolveOp(
            section=section,
            offset=(offset[0], offset[1]),
            axis_point=axis_point,
            axis_dir=axis_dir,
            angle=angle,
            steps=steps,
            transform=transform,
        )

    if f == "bridge_loop":
        raw_loops = _take(call, "loops")
        if not isinstance(raw_loops, list) or not raw_loops:
            _err(call, "loops must be a non-empty list of placed sections")
        loops = tuple(
            _build_placed_section(_expect_call(call, "loops", l)) for l in raw_loops
        )
        cap_start = _bool(call, "cap_start", _take(call, "cap_start", True))
        cap_end = _bool(call, "cap_end", _take(call, "cap_end", True))
        transform = _transform_from(call)
        _finish(call)
        return BridgeLoopOp(
            loops=loops, cap_start=cap_start, cap_end=cap_end, transform=transform
        )

    if f == "boolean":
        opname = _take(call, "op")
        if opname not in ("union", "intersection", "difference"):
            _err(call, f"unknown boolean op {opname!r}")
        raw_ops = _take(call, "operands")
        if not isinstance(raw_ops, list):
            _err(call, "operands must be a list of nested calls")
        operands = tuple(build_op(_expect_call(call, "operands", o)) for o in raw_ops)
        transform = _transform_from(call)
        _finish(call)
        return BooleanOp(op=opname, operands=operands, transform=transform)

    if f == "array_1d":
        proto = build_op(_expect_call(call, "proto", _take(call, "proto")))
        trajectory = _build_trajectory(
            _expect_call(call, "trajectory", _take(call, "trajectory"))
        )
        count = _int(call, "count", _take(call, "count"))
        transform = _transform_from(call)
        _finish(call)
        return Array1DOp(proto=proto, trajectory=trajectory, count=count, transform=transform)

    if f == "array_2d":
        proto = build_op(_expect_call(call, "proto", _take(call, "proto")))
        basis_u = _vec(call, "basis_u", _take(call, "basis_u"), 3)
        basis_v = _vec(call, "basis_v", _take(call, "basis_v"), 3)
        raw_counts = _take(call, "counts")
        if (
            not isinstance(raw_counts, tuple)
            or len(raw_counts) != 2
            or any(isinstance(c, bool) or not isinstance(c, int) for c in raw_counts)
        ):
            _err(call, "counts must be a tuple of 2 integers")
        spacings = _vec(call, "spacings", _take(call, "spacings"), 2)
        transform = _transform_from(call)
        _finish(call)
        return Array2DOp(
            proto=proto,
            basis_u=basis_u,
            basis_v=basis_v,
            counts=(raw_counts[0], raw_counts[1]),
            spacings=(spacings[0], spacings[1]),
            transform=transform,
        )

    if f == "fill_grid":
        boundary = _point_list(call, "boundary", _take(call, "boundary"), 3)
        thickness = _float(call, "thickness", _take(call, "thickness"))
        transform = _transform_from(call)
        _finish(call)
        return FillGridOp(boundary=boundary, thickness=thickness, transform=transform)

    _err(call, f"unknown statement {f!r}")


# --- program -------------------------------------------------------------------


def parse_statement(text: str) -> Op:
    """Parse a single statement (no headers) into an operation node."""
    p = _Parser(text)
    while p.peek().kind == "comment":
        p.next()
    call = p.parse_call()
    while p.peek().kind == "comment":
        p.next()
    if p.peek().kind != "eof":
        p.fail("trailing content after statement")
    return build_op(call)


def parse_program(text: str, validate: bool = True) -> ShapeProgram:
    """Parse program text into an AST.

    Raises :class:`ParseError` at the first syntax violation and, when
    ``validate`` is set, :class:`ValidationError` if the AST breaks a type
    invariant.
    """
    p = _Parser(text)

    tok = p.peek()
    if tok.kind != "comment" or not _OBJECT_HEADER.match(tok.text):
        p.fail("program must start with '# object: <name>'")
    object_name = _OBJECT_HEADER.match(tok.text).group(1)
    p.next()

    object_category = ""
    tok = p.peek()
    if tok.kind == "comment":
        m = _CATEGORY_HEADER.match(tok.text)
        if m:
            object_category = m.group(1)
            p.next()

    parts: list[PartStatement] = []
    while True:
        tok = p.peek()
        if tok.kind == "eof":
            break
        if tok.kind == "comment":
            m = _PART_HEADER.match(tok.text)
            if m is None:
                p.next()  # freeform comment: discarded
                continue
            p.next()
            index, name = int(m.group(1)), m.group(2)
            stmt_tok = p.peek()
            if stmt_tok.kind != "name":
                p.fail("expected a statement after part header")
            call = p.parse_call()
            op = build_op(call)
            parts.append(PartStatement(name, index, op, span=call.span))
        else:
            p.fail("expected a '# part_<i>: <name>' header before statement")

    program = ShapeProgram(object_name, object_category, parts)
    if validate:
        from .validate import validate_program

        errors = [d for d in validate_program(program) if d.severity == "error"]
        if errors:
            raise ValidationError(errors)
    return program
