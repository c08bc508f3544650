import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import polygon_is_simple, shoelace_area
from shapeforge.dsl import (
    canonical_float,
    parse_program,
    parse_statement,
    print_program,
    quantize_op,
    validate_program,
)
from shapeforge.dsl.types import (
    CircleSection,
    LineTrajectory,
    PartStatement,
    PolygonSection,
    PrimitiveKind,
    PrimitiveOp,
    ShapeProgram,
    SimilarityTransform,
    TranslationOp,
)
from shapeforge.errors import ParseError, ValidationError

MINIMAL = """# object: box
# part_0: body
create_primitive(kind='cube', location=(0, 0, 0), rotation=(1, 0, 0, 0), scale=(1, 1, 1))
"""


def test_minimal_program_parses():
    p = parse_program(MINIMAL)
    assert p.object_name == "box"
    assert len(p.parts) == 1
    part = p.parts[0]
    assert part.part_name == "body"
    assert isinstance(part.op, PrimitiveOp)
    assert part.op.kind.name == "cube"
    assert part.transform == SimilarityTransform()


def test_print_parse_roundtrip_minimal():
    p = parse_program(MINIMAL)
    assert parse_program(print_program(p)) == p


def test_zero_scale_raises_validation_error():
    text = MINIMAL.replace("scale=(1, 1, 1)", "scale=(0, 1, 1)")
    with pytest.raises(ValidationError) as exc:
        parse_program(text)
    assert "scale components > 0" in str(exc.value)


def test_empty_parts_program_prints_header_only():
    p = ShapeProgram("lonely")
    assert print_program(p) == "# object: lonely\n"
    assert parse_program(print_program(p)) == p


def test_printing_is_deterministic():
    p = parse_program(MINIMAL)
    assert print_program(p) == print_program(p)


def test_category_header_roundtrip():
    p = ShapeProgram("chair_3", "chair", [])
    text = print_program(p)
    assert "# category: chair" in text
    assert parse_program(text) == p


def test_freeform_comments_are_discarded():
    text = MINIMAL + "# just a note\n"
    assert parse_program(text) == parse_program(MINIMAL)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as exc:
        parse_program("# object: x\n# part_0: y\ncreate_primitive(kind=)\n")
    (line, col), _ = exc.value.diagnostic.span
    assert line == 3
    assert col > 1


def test_unknown_statement_rejected():
    with pytest.raises(ParseError):
        parse_program("# object: x\n# part_0: y\nmake_widget(size=1)\n")


def test_duplicate_kwarg_rejected():
    with pytest.raises(ParseError):
        parse_statement("create_primitive(kind='cube', kind='cube')")


def test_part_index_mismatch_is_invalid():
    text = MINIMAL.replace("part_0", "part_3")
    with pytest.raises(ValidationError):
        parse_program(text)


def test_two_vertex_polygon_is_one_error():
    op = TranslationOp(
        section=PolygonSection(((0.0, 0.0), (1.0, 0.0))),
        trajectory=LineTrajectory((0, 0, 0), (0, 0, 1)),
    )
    prog = ShapeProgram("x", "", [PartStatement("p", 0, op)])
    errors = [d for d in validate_program(prog) if d.severity == "error"]
    assert len(errors) == 1
    assert "3 vertices" in errors[0].message


def test_bowtie_polygon_rejected_matches_oracle():
    bowtie = ((0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0))
    assert polygon_is_simple(bowtie)  # oracle: has a self-intersection
    op = TranslationOp(
        section=PolygonSection(bowtie),
        trajectory=LineTrajectory((0, 0, 0), (0, 0, 1)),
    )
    prog = ShapeProgram("x", "", [PartStatement("p", 0, op)])
    errors = [d for d in validate_program(prog) if d.severity == "error"]
    assert len(errors) == 1
    assert "simple" in errors[0].message


def test_convex_polygon_validates_clean():
    square = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
    assert not polygon_is_simple(square)  # oracle: no intersections
    op = TranslationOp(
        section=PolygonSection(square),
        trajectory=LineTrajectory((0, 0, 0), (0, 0, 1)),
    )
    prog = ShapeProgram("x", "", [PartStatement("p", 0, op)])
    assert validate_program(prog) == []


# --- canonical floats -----------------------------------------------------------


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_canonical_float_is_fixed_point(x):
    c = canonical_float(x)
    assert canonical_float(c) == c
    from shapeforge.dsl import format_number

    assert float(format_number(c)) == c


def test_negative_zero_normalizes():
    from shapeforge.dsl import format_number

    assert format_number(canonical_float(-0.0)) == "0"
    assert canonical_float(-0.0) == 0.0


# --- round trip over generated programs -------------------------------------------


@st.composite
def primitive_ops(draw):
    kind = draw(st.sampled_from(["cube", "cylinder", "uv_sphere", "cone", "torus"]))
    num = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
    pos = st.floats(min_value=0.01, max_value=3.0, allow_nan=False)
    loc = (draw(num), draw(num), draw(num))
    raw = np.array([draw(num), draw(num), draw(num), draw(num)])
    if np.linalg.norm(raw) < 1e-3:
        raw = np.array([1.0, 0, 0, 0])
    q = tuple(raw / np.linalg.norm(raw))
    scale = (draw(pos), draw(pos), draw(pos))
    op = PrimitiveOp(
        kind=PrimitiveKind(kind),
        transform=SimilarityTransform(loc, q, scale),
    )
    return quantize_op(op)


@given(primitive_ops())
def test_roundtrip_generated_primitives(op):
    prog = ShapeProgram("obj", "cat", [PartStatement("part", 0, op)])
    assert parse_program(print_program(prog), validate=False) == prog


def test_roundtrip_small_corpus(small_corpus):
    for family, records in small_corpus.items():
        for rec in records:
            text = print_program(rec.program)
            assert parse_program(text) == rec.program, family
            assert print_program(parse_program(text)) == text


def test_sampler_output_validates_clean(small_corpus):
    for records in small_corpus.values():
        for rec in records:
            assert validate_program(rec.program) == []


def test_sections_evaluate_ccw_by_shoelace():
    from shapeforge.geometry import eval_section

    pts = eval_section(CircleSection(1.0, resolution=16))
    assert shoelace_area(pts) > 0
