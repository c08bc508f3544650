import numpy as np
import pytest

from shapeforge.dsl import parse_program
from shapeforge.dsl.types import (
    BridgeLoopOp,
    CircleSection,
    PartStatement,
    PlacedSection,
    PrimitiveKind,
    PrimitiveOp,
    ShapeProgram,
    SimilarityTransform,
)
from shapeforge.errors import ExecutionError
from shapeforge.geometry import (
    execute_op,
    execute_program,
    load_mesh,
    load_ply,
    make_primitive,
    save_mesh,
    save_obj,
    save_ply_points,
    transform_mesh,
)


def test_empty_program_executes_to_empty_list():
    assert execute_program(ShapeProgram("nothing")) == []


def test_single_primitive_part_matches_transformed_primitive():
    t = SimilarityTransform((0.5, 0, 0), (1, 0, 0, 0), (2, 1, 1))
    prog = ShapeProgram("x", "", [PartStatement("p", 0, PrimitiveOp(PrimitiveKind("cube"), t))])
    [(name, mesh)] = execute_program(prog)
    assert name == "p"
    ref = transform_mesh(make_primitive(PrimitiveKind("cube")), t)
    assert np.array_equal(mesh.vertices, ref.vertices)


def test_execution_is_deterministic(small_corpus):
    for records in small_corpus.values():
        rec = records[0]
        a = execute_program(rec.program)
        b = execute_program(rec.program)
        for (_, ma), (_, mb) in zip(a, b):
            assert np.array_equal(ma.vertices, mb.vertices)
            assert np.array_equal(ma.triangles, mb.triangles)


def test_execution_error_carries_part_index():
    bad = BridgeLoopOp(
        loops=(
            PlacedSection(CircleSection(0.5)),
            PlacedSection(CircleSection(0.5)),  # identical: degenerate bridge
        )
    )
    prog = ShapeProgram(
        "x",
        "",
        [
            PartStatement("ok", 0, PrimitiveOp(PrimitiveKind("cube"))),
            PartStatement("bad", 1, bad),
        ],
    )
    with pytest.raises(ExecutionError) as exc:
        execute_program(prog)
    assert exc.value.part_index == 1


def test_obj_roundtrip(tmp_path):
    mesh = make_primitive(PrimitiveKind("cylinder", segments=12))
    path = tmp_path / "m.obj"
    save_obj(path, mesh)
    back = load_mesh(path)
    assert np.allclose(back.vertices, mesh.vertices)
    assert np.array_equal(back.triangles, mesh.triangles)
    assert back.watertight


def test_obj_quad_export_roundtrip(tmp_path):
    mesh = make_primitive(PrimitiveKind("cube"))
    path = tmp_path / "q.obj"
    save_obj(path, mesh, quads=True)
    text = path.read_text()
    assert sum(1 for l in text.splitlines() if l.startswith("f ")) == 6
    back = load_mesh(path)
    assert back.watertight
    from shapeforge.geometry import mesh_volume

    assert mesh_volume(back) == 8.0


def test_ply_mesh_roundtrip_bitwise(tmp_path):
    mesh = make_primitive(PrimitiveKind("uv_sphere", segments=12, rings=6))
    p1, p2 = tmp_path / "a.ply", tmp_path / "b.ply"
    save_mesh(p1, mesh)
    save_mesh(p2, mesh)
    assert p1.read_bytes() == p2.read_bytes()
    back = load_mesh(p1)
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.triangles, mesh.triangles)


def test_ply_point_cloud_roundtrip(tmp_path):
    pts = np.random.default_rng(0).normal(size=(100, 3))
    path = tmp_path / "c.ply"
    save_ply_points(path, pts, comments=["seed 0"])
    verts, tris, comments = load_ply(path)
    assert tris is None
    assert np.array_equal(verts, pts)
    assert "seed 0" in comments
