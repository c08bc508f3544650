import math

import numpy as np
import pytest

from oracles import brute_characteristic_cell
from shapeforge.assembly import (
    AcceptResult,
    CharacteristicCell,
    PartInstance,
    accept_part_fit,
    assemble_object_program,
    canonicalize_part,
    characteristic_cell,
    decanonicalize_code,
    object_bbox_of,
    order_parts,
)
from shapeforge.dsl import parse_program, print_program, retarget_op
from shapeforge.dsl.types import (
    PartStatement,
    PrimitiveKind,
    PrimitiveOp,
    SimilarityTransform,
)
from shapeforge.errors import MissingCode
from shapeforge.geometry import execute_op, execute_program, make_primitive, transform_mesh
from shapeforge.metrics import chamfer_l2
from shapeforge.pointcloud import sample_surface
from shapeforge.sampler import sample_part
from shapeforge.transforms import compose, invert, quat_from_axis_angle, quat_mul


def _box_at(location, scale):
    return transform_mesh(
        make_primitive(PrimitiveKind("cube")),
        SimilarityTransform(location=location, scale=scale),
    )


def test_canonicalize_identity_for_canonical_part():
    cube = make_primitive(PrimitiveKind("cube"))
    out, t = canonicalize_part(cube)
    assert np.allclose(t.location, 0, atol=1e-12)
    assert np.allclose(t.scale, 1, atol=1e-12)
    assert np.array_equal(out.vertices, cube.vertices)


def test_canonicalize_scaled_shifted_cube():
    part = _box_at((0.3, -0.2, 0.5), (0.25, 0.25, 0.25))
    out, t = canonicalize_part(part)
    assert np.allclose(t.scale, 4.0)
    lo, hi = out.vertices.min(axis=0), out.vertices.max(axis=0)
    assert np.allclose(lo, -1, atol=1e-12)
    assert np.allclose(hi, 1, atol=1e-12)


def test_canonicalize_roundtrip_vertexwise(small_corpus):
    for family in ("primitive", "translation", "fill_grid"):
        rec = small_corpus[family][0]
        mesh = execute_op(rec.program.parts[0].op)
        canonical, t = canonicalize_part(mesh)
        back = transform_mesh(canonical, invert(t))
        assert np.abs(back.vertices - mesh.vertices).max() < 1e-9


def test_canonicalize_pca_mode_axis_aligns_rotated_box():
    q = quat_from_axis_angle((0, 0, 1), 0.6)
    part = transform_mesh(
        make_primitive(PrimitiveKind("cube")),
        SimilarityTransform(rotation=q, scale=(1.0, 0.4, 0.2)),
    )
    canonical, t = canonicalize_part(part, mode="pca")
    lo, hi = canonical.vertices.min(axis=0), canonical.vertices.max(axis=0)
    # principal frame restores an axis-aligned box spanning [-1, 1] in x
    assert hi[0] - lo[0] == pytest.approx(2.0, abs=1e-9)
    back = transform_mesh(canonical, invert(t))
    assert np.abs(back.vertices - part.vertices).max() < 1e-9


def test_decanonicalize_identity():
    op = PrimitiveOp(PrimitiveKind("cube"))
    assert decanonicalize_code(op, SimilarityTransform()) == op


def test_decanonicalize_matches_closed_form_composition():
    q = quat_from_axis_angle((1, 1, 0), 0.8)
    t = SimilarityTransform((0.2, -0.4, 0.6), q, (2.0, 2.0, 2.0))
    code = PrimitiveOp(
        PrimitiveKind("cube"),
        SimilarityTransform((0.1, 0.0, -0.3), quat_from_axis_angle((0, 1, 0), 0.3), (0.5, 0.5, 0.5)),
    )
    out = decanonicalize_code(code, t)
    # closed-form oracle: inverse of t composed with the code transform
    inv = invert(t)
    expected_scale = np.array(inv.scale) * np.array(code.transform.scale)
    expected_rot = quat_mul(inv.rotation, code.transform.rotation)
    expected = compose(inv, code.transform)
    assert np.allclose(out.transform.location, expected.location, atol=1e-12)
    assert np.allclose(out.transform.scale, expected_scale, atol=1e-12)
    qa, qb = np.array(out.transform.rotation), np.array(expected_rot)
    assert min(np.abs(qa - qb).max(), np.abs(qa + qb).max()) < 1e-9


def test_decanonicalize_sweep_execute_and_compare(small_corpus):
    rec = small_corpus["translation"][0]
    op = rec.program.parts[0].op
    mesh = execute_op(op)
    canonical_mesh, t = canonicalize_part(mesh)
    canonical_code = retarget_op(op, t)
    world_code = decanonicalize_code(canonical_code, t)
    back = execute_op(world_code)
    a = sample_surface(back, 8000, 5).points
    b = sample_surface(mesh, 8000, 5).points
    assert chamfer_l2(a, b) <= 1e-6


# --- characteristic cells and ordering -----------------------------------------


def test_part_filling_first_cell():
    bbox = ((0.0, 0.0, 0.0), (32.0, 32.0, 32.0))
    part = _box_at((0.5, 0.5, 0.5), (0.45, 0.45, 0.45))  # inside cell (0,0,0)
    assert characteristic_cell(part, bbox) == CharacteristicCell(0, 0, 0)


def test_characteristic_cell_min_z_then_x_then_y():
    bbox = ((0.0, 0.0, 0.0), (32.0, 32.0, 32.0))
    # two columns at x=3 and x=7 (cells), occupying z rows 5..9; at x=3 the
    # lowest-y occupied cell is y=2
    col1 = _box_at((3.5, 2.5, 7.5), (0.4, 0.4, 2.4))
    col2 = _box_at((7.5, 1.5, 7.5), (0.4, 0.4, 2.4))
    from shapeforge.geometry import merge_meshes

    part = merge_meshes([col1, col2])
    cell = characteristic_cell(part, bbox)
    assert (cell.iz, cell.ix) == (5, 3)
    assert cell.iy == 2
    assert (cell.iz, cell.ix, cell.iy) == brute_characteristic_cell(part, bbox)


def test_cells_invariant_under_object_translation():
    parts = [_box_at((0.2, 0.3, 0.1), (0.1, 0.1, 0.1)), _box_at((0.8, 0.1, 0.7), (0.1, 0.1, 0.1))]
    bbox1 = object_bbox_of([PartInstance(p, "x") for p in parts])
    cells1 = [characteristic_cell(p, bbox1) for p in parts]
    shift = SimilarityTransform(location=(5.0, -3.0, 2.0))
    moved = [transform_mesh(p, shift) for p in parts]
    bbox2 = object_bbox_of([PartInstance(p, "x") for p in moved])
    cells2 = [characteristic_cell(p, bbox2) for p in moved]
    assert cells1 == cells2


def test_order_seat_below_backrest():
    seat = PartInstance(_box_at((0, 0, 0.3), (0.5, 0.5, 0.1)), "seat")
    back = PartInstance(_box_at((0, 0.45, 0.9), (0.5, 0.05, 0.5)), "backrest")
    bbox = object_bbox_of([back, seat])
    order = order_parts([back, seat], bbox)
    assert [p.semantic_label for p in ([back, seat][i] for i in order)] == ["seat", "backrest"]


def test_four_legs_ordered_x_then_y():
    legs = {
        "xy": (0.1, 0.1),
        "xY": (0.1, 0.9),
        "Xy": (0.9, 0.1),
        "XY": (0.9, 0.9),
    }
    parts = [
        PartInstance(_box_at((x, y, 0.4), (0.05, 0.05, 0.4)), name)
        for name, (x, y) in legs.items()
    ]
    bbox = object_bbox_of(parts)
    order = order_parts(parts, bbox)
    assert [parts[i].semantic_label for i in order] == ["xy", "xY", "Xy", "XY"]


def test_order_invariant_under_input_permutation():
    rng = np.random.default_rng(9)
    parts = [
        PartInstance(
            _box_at(tuple(rng.uniform(0.1, 0.9, 3)), (0.03, 0.03, 0.03)), f"p{i}"
        )
        for i in range(6)
    ]
    bbox = object_bbox_of(parts)
    base = [parts[i].semantic_label for i in order_parts(parts, bbox)]
    for _ in range(3):
        perm = rng.permutation(len(parts))
        shuffled = [parts[i] for i in perm]
        labels = [shuffled[i].semantic_label for i in order_parts(shuffled, bbox)]
        assert labels == base


def test_ties_keep_input_order():
    a = PartInstance(_box_at((0.5, 0.5, 0.5), (0.2, 0.2, 0.2)), "first")
    b = PartInstance(_box_at((0.5, 0.5, 0.5), (0.2, 0.2, 0.2)), "second")
    bbox = object_bbox_of([a, b])
    assert order_parts([a, b], bbox) == [0, 1]


# --- assembly -------------------------------------------------------------------


def _instance_from_record(rec):
    op = rec.program.parts[0].op
    mesh = execute_op(op)
    canonical_mesh, t = canonicalize_part(mesh)
    code = retarget_op(op, t)
    return PartInstance(mesh, rec.family, code, t), mesh


def test_assemble_single_part():
    rec = sample_part("primitive", 8800)
    inst, _ = _instance_from_record(rec)
    program = assemble_object_program([inst], "solo", "test")
    assert len(program.parts) == 1
    assert program.parts[0].part_index == 0
    assert program.parts[0].part_name == "primitive"


def test_assemble_missing_code_raises():
    inst = PartInstance(make_primitive(PrimitiveKind("cube")), "naked")
    with pytest.raises(MissingCode):
        assemble_object_program([inst], "x")


def test_assembled_program_roundtrips_and_reconstructs():
    records = [sample_part(f, 9000 + i) for i, f in enumerate(
        ("primitive", "translation", "boolean", "fill_grid", "bridge_loop")
    )]
    instances = []
    meshes = []
    for rec in records:
        inst, mesh = _instance_from_record(rec)
        instances.append(inst)
        meshes.append(mesh)
    bbox = object_bbox_of(instances)
    order = order_parts(instances, bbox)
    ordered = [instances[i] for i in order]
    program = assemble_object_program(ordered, "multi", "demo")

    text = print_program(program)
    assert parse_program(text) == program

    executed = execute_program(program)
    assert len(executed) == len(ordered)
    for (_, rebuilt), inst in zip(executed, ordered):
        a = sample_surface(rebuilt, 8000, 3).points
        b = sample_surface(inst.mesh, 8000, 3).points
        assert chamfer_l2(a, b) <= 1e-6


# --- acceptance criterion ---------------------------------------------------------


def test_accept_ground_truth_code(small_corpus):
    rec = small_corpus["primitive"][0]
    op = rec.program.parts[0].op
    mesh = execute_op(op)
    canonical_mesh, t = canonicalize_part(mesh)
    gt = sample_surface(canonical_mesh, 4096, 17)
    result = accept_part_fit(gt, retarget_op(op, t))
    assert result.accepted
    assert result.cd < 1e-12


def test_reject_mis_scaled_prediction():
    big = transform_mesh(
        make_primitive(PrimitiveKind("cube")), SimilarityTransform(scale=(1.5, 1.5, 1.5))
    )
    gt = sample_surface(big, 4096, 18)
    result = accept_part_fit(gt, PrimitiveOp(PrimitiveKind("cube")))
    assert not result.accepted
    assert result.cd > 5e-3


def test_threshold_comparison_is_strict():
    big = transform_mesh(
        make_primitive(PrimitiveKind("cube")), SimilarityTransform(scale=(1.02, 1.02, 1.02))
    )
    gt = sample_surface(big, 2048, 19)
    probe = accept_part_fit(gt, PrimitiveOp(PrimitiveKind("cube")))
    assert probe.cd > 0
    at_threshold = accept_part_fit(gt, PrimitiveOp(PrimitiveKind("cube")), threshold=probe.cd)
    assert not at_threshold.accepted  # cd == threshold must reject


def test_execution_failure_counts_as_rejection():
    from shapeforge.dsl.types import BridgeLoopOp, CircleSection, PlacedSection

    bad = BridgeLoopOp(
        loops=(PlacedSection(CircleSection(0.5)), PlacedSection(CircleSection(0.5)))
    )
    cube = make_primitive(PrimitiveKind("cube"))
    gt = sample_surface(cube, 1024, 20)
    result = accept_part_fit(gt, bad)
    assert not result.accepted
    assert result.reason
