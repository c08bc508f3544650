"""Mesh and point-cloud file formats: ASCII OBJ and binary little-endian PLY."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mesh import Mesh, make_mesh


def save_obj(path, mesh: Mesh, quads: bool = False) -> None:
    """Write ASCII OBJ (v/f records, 1-based indices). Deterministic bytes.

    With ``quads`` the quad-pair metadata is emitted as 4-gon faces.
    """
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}")
    emitted = np.zeros(len(mesh.triangles), dtype=bool)
    if quads and mesh.quad_pairs is not None:
        for i1, i2 in mesh.quad_pairs:
            t1, t2 = mesh.triangles[i1], mesh.triangles[i2]
            s2 = set(t2)
            k = next(
                (k for k in range(3) if t1[k] in s2 and t1[(k + 1) % 3] in s2), None
            )
            if k is None:
                continue
            u, v_, r = t1[k], t1[(k + 1) % 3], t1[(k + 2) % 3]
            w = next(x for x in t2 if x not in (u, v_, r))
            lines.append(f"f {r + 1} {u + 1} {w + 1} {v_ + 1}")
            emitted[i1] = emitted[i2] = True
    for i, t in enumerate(mesh.triangles):
        if not emitted[i]:
            lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_obj(path) -> Mesh:
    """Read an OBJ file; polygon faces are fan-triangulated."""
    verts = []
    tris = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = [int(tok.split("/")[0]) for tok in parts[1:]]
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            for k in range(1, len(idx) - 1):
                tris.append([idx[0], idx[k], idx[k + 1]])
    return make_mesh(np.asarray(verts, dtype=float).reshape(-1, 3), tris)


def save_ply_mesh(path, mesh: Mesh, comments: list[str] | None = None) -> None:
    """Binary little-endian PLY: float64 vertices, int32 face indices."""
    header = ["ply", "format binary_little_endian 1.0"]
    for c in comments or []:
        header.append(f"comment {c}")
    header += [
        f"element vertex {len(mesh.vertices)}",
        "property double x",
        "property double y",
        "property double z",
        f"element face {len(mesh.triangles)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(mesh.vertices, dtype="<f8").tobytes())
        for t in mesh.triangles:
            fh.write(struct.pack("<Biii", 3, int(t[0]), int(t[1]), int(t[2])))


def save_ply_points(path, points: np.ndarray, comments: list[str] | None = None) -> None:
    """Binary little-endian PLY point cloud (x, y, z float64) with comments."""
    header = ["ply", "format binary_little_endian 1.0"]
    for c in comments or []:
        header.append(f"comment {c}")
    header += [
        f"element vertex {len(points)}",
        "property double x",
        "property double y",
        "property double z",
        "end_header",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(points, dtype="<f8").tobytes())


def _parse_ply_header(fh):
    magic = fh.readline().strip()
    if magic != b"ply":
        raise ValueError("not a PLY file")
    fmt = fh.readline().strip()
    if b"binary_little_endian" not in fmt:
        raise ValueError("only binary little-endian PLY is supported")
    counts = {"vertex": 0, "face": 0}
    comments = []
    current = None
    vertex_props = []
    while True:
        line = fh.readline()
        if not line:
            raise ValueError("truncated PLY header")
        line = line.strip()
        if line == b"end_header":
            break
        toks = line.split()
        if toks[0] == b"comment":
            comments.append(line[len(b"comment ") :].decode("utf-8", "replace"))
        elif toks[0] == b"element":
            current = toks[1].decode()
            counts[current] = int(toks[2])
        elif toks[0] == b"property" and current == "vertex":
            vertex_props.append((toks[1].decode(), toks[-1].decode()))
    return counts, comments, vertex_props


def load_ply(path):
    """Read a PLY written by this module. Returns (vertices, triangles, comments);
    ``triangles`` is None for point clouds."""
    with open(path, "rb") as fh:
        counts, comments, vertex_props = _parse_ply_header(fh)
        if [p for p, _ in vertex_props][:3] != ["double", "double", "double"]:
            raise ValueError("expected float64 x,y,z vertex properties")
        n = counts.get("vertex", 0)
        verts = np.frombuffer(fh.read(24 * n), dtype="<f8").reshape(n, 3).copy()
        nf = counts.get("face", 0)
        if nf == 0:
            return verts, None, comments
        tris = np.empty((nf, 3), dtype=np.int64)
        for i in range(nf):
            (cnt,) = struct.unpack("<B", fh.read(1))
            idx = struct.unpack(f"<{cnt}i", fh.read(4 * cnt))
            if cnt != 3:
                raise ValueError("only triangle faces are supported")
            tris[i] = idx
        return verts, tris, comments


def load_mesh(path) -> Mesh:
    """Load OBJ or PLY by extension."""
    p = Path(path)
    if p.suffix.lower() == ".obj":
        return load_obj(p)
    if p.suffix.lower() == ".ply":
        verts, tris, _ = load_ply(p)
        if tris is None:
            raise ValueError(f"{path} is a point cloud, not a mesh")
        return make_mesh(verts, tris)
    raise ValueError(f"unsupported mesh format: {p.suffix}")


def save_mesh(path, mesh: Mesh) -> None:
    p = Path(path)
    if p.suffix.lower() == ".obj":
        save_obj(p, mesh)
    elif p.suffix.lower() == ".ply":
        save_ply_mesh(p, mesh)
    else:
        raise ValueError(f"unsupported mesh format: {p.suffix}")
