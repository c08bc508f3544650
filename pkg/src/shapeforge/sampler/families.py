"""Per-family parameter sampling for paired (program, mesh) part data.

Every draw is a pure function of (family, seed): randomness comes from a
Philox generator keyed by the seed, and geometric failures retry on
jumped streams with the attempt count recorded. All float parameters are
quantized to canonical 6-significant-digit form before the final mesh is
measured, so program text, execution, and recorded bounding boxes agree
bitwise across platforms.
"""

from __future__ import annotations

import dataclasses as _dc
import math
from dataclasses import dataclass, field

import numpy as np

from ..dsl import quantize_op
from ..dsl.types import (
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
from ..errors import GeometryFailure, PlacementFailure, ShapeForgeError
from ..geometry.execute import execute_op
from ..geometry.mesh import mesh_bbox
from ..prng import rng_for_seed
from ..transforms import quat_between, quat_from_axis_angle, quat_mul
from .config import SamplerConfig

MAX_ATTEMPTS = 64
DEFAULT_CONFIG = SamplerConfig()


@dataclass
class SampleRecord:
    seed: int
    family: str
    program: ShapeProgram
    bbox: tuple[tuple[float, float, float], tuple[float, float, float]]
    metadata: dict = field(default_factory=dict)


# --- shared draw helpers -----------------------------------------------------


def _unit_direction(rng) -> np.ndarray:
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2 * math.pi)
    r = math.sqrt(max(1.0 - z * z, 0.0))
    return np.array([r * math.cos(phi), r * math.sin(phi), z])


def _random_orientation(rng):
    """Uniform direction for the local +z axis plus a roll angle about it."""
    direction = _unit_direction(rng)
    roll = rng.uniform(0.0, 2 * math.pi)
    q = quat_mul(quat_between((0.0, 0.0, 1.0), tuple(direction)),
                 quat_from_axis_angle((0.0, 0.0, 1.0), roll))
    return q, direction, roll


def _orthonormal_pair(rng):
    a = _unit_direction(rng)
    b = _unit_direction(rng)
    b = b - np.dot(a, b) * a
    n = np.linalg.norm(b)
    if n < 1e-6:
        b = np.cross(a, [1.0, 0.0, 0.0])
        n = np.linalg.norm(b)
    return a, b / n


def _star_points(rng, n: int, radius: float, jitter=(0.6, 1.0)) -> np.ndarray:
    """Star-shaped (hence simple) polygon anchors around the origin."""
    base = 2 * math.pi * np.arange(n) / n
    ang = base + rng.uniform(-0.3, 0.3, n) * (2 * math.pi / n)
    rad = radius * rng.uniform(jitter[0], jitter[1], n)
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


def _tuple2(a) -> tuple:
    return (float(a[0]), float(a[1]))


def _tuple3(a) -> tuple:
    return (float(a[0]), float(a[1]), float(a[2]))


def _place(op_local: Op, rng, cfg: SamplerConfig):
    """Uniformly rescale the op so its longest bbox edge hits the target,
    then draw a location keeping the mesh inside [-1, 1]^3 with margin.

    The placed mesh is the exact linear image f * x + loc of the local
    mesh, so its bbox and volume derive from the local execution without
    running the op again. Quantizing the program afterwards perturbs the
    executed geometry by ~1e-6, far inside the placement margin.
    """
    mesh_local = execute_op(op_local)
    lo, hi = mesh_bbox(mesh_local)
    longest = float((hi - lo).max())
    if longest <= 0:
        raise GeometryFailure("sampled shape has zero extent")
    target = rng.uniform(*cfg.longest_edge)
    f = target / longest
    lo2, hi2 = lo * f, hi * f
    m = cfg.placement_margin
    low = -1.0 + m - lo2
    high = 1.0 - m - hi2
    if np.any(high < low):
        raise GeometryFailure("shape too large to place")
    loc = rng.uniform(low, high)
    t = op_local.transform
    placed = _dc.replace(
        op_local,
        transform=SimilarityTransform(
            location=_tuple3(loc),
            rotation=t.rotation,
            scale=(f * t.scale[0], f * t.scale[1], f * t.scale[2]),
        ),
    )
    return quantize_op(placed), mesh_local, f, loc, target


def _with_transform(op: Op, t: SimilarityTransform) -> Op:
    return _dc.replace(op, transform=t)


# --- primitive ----------------------------------------------------------------


def _draw_primitive_kind(rng, small: bool = False) -> PrimitiveKind:
    """``small`` keeps CSG-operand polygon counts low (clipping is quadratic)."""
    names = ("cube", "cylinder", "uv_sphere", "cone", "torus")
    name = names[int(rng.integers(len(names)))]
    if small:
        if name == "cylinder" or name == "cone":
            return PrimitiveKind(name, segments=12)
        if name == "uv_sphere":
            return PrimitiveKind(name, segments=12, rings=6)
        if name == "torus":
            return PrimitiveKind(name, major_segments=16, minor_segments=6)
    return PrimitiveKind(name)


def _draw_primitive_op(rng, cfg: SamplerConfig, small: bool = False):
    ranges = cfg.family_config("primitive").merged_ranges()
    lo, hi = ranges["log10_scale"]
    kind = _draw_primitive_kind(rng, small)
    logs = rng.uniform(lo, hi, 3)
    raw_scale = np.power(10.0, logs)
    q, direction, roll = _random_orientation(rng)
    op = PrimitiveOp(
        kind=kind,
        transform=SimilarityTransform(rotation=q, scale=_tuple3(raw_scale)),
    )
    meta = {
        "kind": kind.name,
        "log10_scale": [float(x) for x in logs],
        "direction": _tuple3(direction),
        "roll": float(roll),
    }
    return op, meta


def sample_primitive_params(seed: int, cfg: SamplerConfig = DEFAULT_CONFIG) -> PartStatement:
    """Single placed primitive statement; deterministic under seed."""
    record = sample_part("primitive", seed, cfg)
    return record.program.parts[0]


# --- translation ---------------------------------------------------------------


def _draw_section(rng, size_range, kinds=("rectangle", "circle", "arc", "polygon", "bezier")):
    kind = kinds[int(rng.integers(len(kinds)))]
    lo, hi = size_range
    if kind == "rectangle":
        return RectangleSection(rng.uniform(lo, hi), rng.uniform(lo, hi))
    if kind == "circle":
        return CircleSection(rng.uniform(lo, hi) / 2 + lo / 2)
    if kind == "arc":
        start = rng.uniform(0.0, 2 * math.pi)
        span = rng.uniform(math.pi / 2, 1.75 * math.pi)
        return ArcSection(
            radius=rng.uniform(lo, hi) / 2 + lo / 2,
            start_angle=start,
            end_angle=start + span,
            chord_closed=bool(rng.integers(2)),
        )
    if kind == "polygon":
        n = int(rng.integers(3, 9))
        return PolygonSection(tuple(map(_tuple2, _star_points(rng, n, rng.uniform(lo, hi) / 2 + lo / 2))))
    n = int(rng.integers(4, 9))
    return BezierSection(
        tuple(map(_tuple2, _star_points(rng, n, rng.uniform(lo, hi) / 2 + lo / 2, (0.7, 1.0)))),
        closed=True,
    )


def _section_radius_of(section) -> float:
    if isinstance(section, RectangleSection):
        return math.hypot(section.width, section.height) / 2
    if isinstance(section, (CircleSection, ArcSection)):
        return section.radius
    return max(math.hypot(*p) for p in section.points)


def _shrink_section(section, factor: float):
    if factor >= 1.0:
        return section
    if isinstance(section, RectangleSection):
        return RectangleSection(section.width * factor, section.height * factor)
    if isinstance(section, CircleSection):
        return CircleSection(section.radius * factor, section.resolution)
    if isinstance(section, ArcSection):
        return _dc.replace(section, radius=section.radius * factor)
    scaled = tuple((p[0] * factor, p[1] * factor) for p in section.points)
    return _dc.replace(section, points=scaled)


def _draw_trajectory(rng, ranges):
    kinds = ("line", "polyline", "circle", "arc", "rectangle", "bezier")
    kind = kinds[int(rng.integers(len(kinds)))]
    llo, lhi = ranges["line_length"]
    rlo, rhi = ranges["curve_radius"]
    if kind == "line":
        start = rng.uniform(-0.8, 0.8, 3)
        d = _unit_direction(rng) * rng.uniform(llo, lhi)
        return LineTrajectory(_tuple3(start), _tuple3(start + d))
    if kind in ("polyline", "bezier"):
        count = int(rng.integers(3, 5))
        pts = [rng.uniform(-0.6, 0.6, 3)]
        direction = _unit_direction(rng)
        for _ in range(count - 1):
            step = rng.uniform(0.35, 0.8)
            turn = _unit_direction(rng)
            direction = direction + 0.8 * turn
            direction /= np.linalg.norm(direction)
            pts.append(pts[-1] + direction * step)
        tup = tuple(map(_tuple3, pts))
        return PolylineTrajectory(tup) if kind == "polyline" else BezierTrajectory(tup)
    if kind == "circle":
        return CircleTrajectory(
            (0.0, 0.0, 0.0), _tuple3(_unit_direction(rng)), rng.uniform(rlo, rhi)
        )
    if kind == "arc":
        start = rng.uniform(0.0, 2 * math.pi)
        return ArcTrajectory(
            (0.0, 0.0, 0.0),
            _tuple3(_unit_direction(rng)),
            rng.uniform(rlo, rhi),
            start,
            start + rng.uniform(math.pi / 2, 1.5 * math.pi),
        )
    u, v = _orthonormal_pair(rng)
    return RectangleTrajectory(
        (0.0, 0.0, 0.0), _tuple3(u), _tuple3(v), rng.uniform(0.8, 1.8), rng.uniform(0.8, 1.8)
    )


def _min_turn_radius(traj) -> float:
    if isinstance(traj, (CircleTrajectory, ArcTrajectory)):
        return traj.radius
    if isinstance(traj, RectangleTrajectory):
        return min(traj.width, traj.height) / 2
    return math.inf


def _draw_translation_op(rng, cfg: SamplerConfig):
    ranges = cfg.family_config("translation").merged_ranges()
    if rng.random() < ranges["revolve_prob"]:
        section = _draw_section(rng, (0.15, 0.5), kinds=("rectangle", "circle", "polygon", "bezier"))
        radius = _section_radius_of(section)
        offset_u = radius + rng.uniform(0.1, 0.6)
        full = rng.random() < 0.7
        angle = 2 * math.pi if full else rng.uniform(math.pi / 2, 2 * math.pi)
        op = RevolveOp(
            section=section,
            offset=(offset_u, 0.0),
            angle=angle,
            steps=48,
        )
        return op, {"variant": "revolve", "full_turn": full}
    section = _draw_section(rng, ranges["section_size"])
    traj = _draw_trajectory(rng, ranges)
    turn = _min_turn_radius(traj)
    radius = _section_radius_of(section)
    if radius > 0.45 * turn:
        section = _shrink_section(section, 0.45 * turn / radius)
    if rng.random() < ranges["profile_constant_prob"]:
        profile = ((0.0, 1.0), (1.0, 1.0))
    else:
        end = rng.uniform(*ranges["profile_end_scale"])
        if rng.random() < 0.25:
            profile = ((0.0, 1.0), (0.5, rng.uniform(0.5, 1.5)), (1.0, end))
        else:
            profile = ((0.0, 1.0), (1.0, end))
    op = TranslationOp(section=section, trajectory=traj, scale_profile=profile)
    return op, {"variant": "sweep", "trajectory": type(traj).__name__}


# --- bridge loop ----------------------------------------------------------------


def _draw_bridge_op(rng, cfg: SamplerConfig):
    ranges = cfg.family_config("bridge_loop").merged_ranges()
    nlo, nhi = ranges["loops"]
    count = int(rng.integers(nlo, nhi + 1))
    zs = np.sort(rng.uniform(-0.8, 0.8, count))
    while np.any(np.diff(zs) < 0.25):
        zs = np.linspace(-0.7, 0.7, count) + rng.uniform(-0.05, 0.05, count)
        zs = np.sort(zs)
    slo, shi = ranges["loop_size"]
    loops = []
    for z in zs:
        section = _draw_section(rng, (slo, shi), kinds=("rectangle", "circle", "polygon"))
        tilt_axis = (math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a), 0.0)
        tilt = quat_from_axis_angle(tilt_axis, rng.uniform(0.0, ranges["tilt_max"]))
        jitter = ranges["xy_jitter"]
        loops.append(
            PlacedSection(
                section=section,
                location=(rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter), float(z)),
                rotation=tilt,
                scale=1.0,
            )
        )
    op = BridgeLoopOp(loops=tuple(loops), cap_start=True, cap_end=True)
    return op, {"loops": count}


# --- boolean ---------------------------------------------------------------------


def _draw_operand(rng, cfg: SamplerConfig, center: np.ndarray):
    """Primitive or simple swept operand rescaled to roughly unit size."""
    ranges = cfg.family_config("boolean").merged_ranges()
    elo, ehi = ranges["operand_edge"]
    if rng.random() < 0.7:
        op, _ = _draw_primitive_op(rng, cfg, small=True)
    else:
        section = _draw_section(rng, (0.3, 0.8), kinds=("rectangle", "circle"))
        if hasattr(section, "resolution"):
            section = _dc.replace(section, resolution=16)
        start = -_unit_direction(rng) * rng.uniform(0.5, 0.9)
        op = TranslationOp(
            section=section,
            trajectory=LineTrajectory(_tuple3(start), _tuple3(-start)),
        )
    mesh = execute_op(op)
    lo, hi = mesh_bbox(mesh)
    f = rng.uniform(elo, ehi) / float((hi - lo).max())
    t = op.transform
    return _with_transform(
        op,
        SimilarityTransform(
            location=_tuple3(center),
            rotation=t.rotation,
            scale=(f * t.scale[0], f * t.scale[1], f * t.scale[2]),
        ),
    )


def _draw_boolean_op(rng, cfg: SamplerConfig):
    ranges = cfg.family_config("boolean").merged_ranges()
    ops = ("union", "intersection", "difference")
    opname = ops[int(rng.integers(3))]
    olo, ohi = ranges["operands"]
    count = olo
    if opname != "intersection" and ohi > olo and rng.random() < ranges["third_operand_prob"]:
        count = int(rng.integers(olo + 1, ohi + 1))
    operands = [_draw_operand(rng, cfg, np.zeros(3))]
    for _ in range(count - 1):
        offset = rng.uniform(-0.45, 0.45, 3)
        operands.append(_draw_operand(rng, cfg, offset))
    op = BooleanOp(op=opname, operands=tuple(operands))
    return op, {"op": opname, "operands": count}


# --- array ----------------------------------------------------------------------


def _draw_array_op(rng, cfg: SamplerConfig):
    ranges = cfg.family_config("array").merged_ranges()
    proto, _ = _draw_primitive_op(rng, cfg, small=True)
    flo, fhi = ranges["proto_fill"]
    if rng.random() < ranges["one_d_prob"]:
        clo, chi = ranges["count"]
        count = int(rng.integers(clo, chi + 1))
        if rng.random() < 0.6:
            start = rng.uniform(-0.5, 0.5, 3)
            d = _unit_direction(rng) * rng.uniform(2.5, 4.0)
            traj = LineTrajectory(_tuple3(start), _tuple3(start + d))
            spacing = np.linalg.norm(d) / max(count - 1, 1)
        else:
            radius = rng.uniform(1.2, 2.0)
            traj = CircleTrajectory((0.0, 0.0, 0.0), _tuple3(_unit_direction(rng)), radius)
            spacing = 2 * math.pi * radius / count
        proto = _rescale_proto(proto, spacing * rng.uniform(flo, fhi))
        op = Array1DOp(proto=proto, trajectory=traj, count=count)
        return op, {"variant": "1d", "count": count}
    glo, ghi = ranges["grid_count"]
    counts = (int(rng.integers(glo, ghi + 1)), int(rng.integers(glo, ghi + 1)))
    slo, shi = ranges["spacing"]
    spacings = (rng.uniform(slo, shi), rng.uniform(slo, shi))
    if rng.random() < 0.5:
        basis_u, basis_v = np.eye(3)[0], np.eye(3)[1]
    else:
        basis_u, basis_v = _orthonormal_pair(rng)
    proto = _rescale_proto(proto, min(spacings) * rng.uniform(flo, fhi))
    op = Array2DOp(
        proto=proto,
        basis_u=_tuple3(basis_u),
        basis_v=_tuple3(basis_v),
        counts=counts,
        spacings=(float(spacings[0]), float(spacings[1])),
    )
    return op, {"variant": "2d", "counts": list(counts)}


def _rescale_proto(proto: Op, target_edge: float) -> Op:
    mesh = execute_op(proto)
    lo, hi = mesh_bbox(mesh)
    f = target_edge / float((hi - lo).max())
    t = proto.transform
    return _with_transform(
        proto,
        SimilarityTransform(
            location=t.location,
            rotation=t.rotation,
            scale=(f * t.scale[0], f * t.scale[1], f * t.scale[2]),
        ),
    )


# --- fill grid --------------------------------------------------------------------


def _draw_fill_op(rng, cfg: SamplerConfig):
    ranges = cfg.family_config("fill_grid").merged_ranges()
    nlo, nhi = ranges["vertices"]
    n = int(rng.integers(nlo, nhi + 1))
    radius = rng.uniform(*ranges["radius"])
    pts2 = _star_points(rng, n, radius)
    normal = _unit_direction(rng)
    trial = np.eye(3)[int(np.argmin(np.abs(normal)))]
    e1 = trial - np.dot(trial, normal) * normal
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    pts3 = np.outer(pts2[:, 0], e1) + np.outer(pts2[:, 1], e2)
    if rng.random() < ranges["nonplanar_prob"]:
        pts3 = pts3 + np.outer(
            rng.uniform(-ranges["nonplanar_jitter"], ranges["nonplanar_jitter"], n) * radius,
            normal,
        )
    thickness = rng.uniform(*ranges["thickness"]) * radius
    op = FillGridOp(boundary=tuple(map(_tuple3, pts3)), thickness=float(thickness))
    return op, {"vertices": n}


# --- entry points -----------------------------------------------------------------

_DRAWERS = {
    "primitive": _draw_primitive_op,
    "translation": _draw_translation_op,
    "bridge_loop": _draw_bridge_op,
    "boolean": _draw_boolean_op,
    "array": _draw_array_op,
    "fill_grid": _draw_fill_op,
}


def sample_part(family: str, seed: int, cfg: SamplerConfig = DEFAULT_CONFIG) -> SampleRecord:
    """Draw one part for the family; deterministic in (family, seed).

    Geometry failures (robustness, empty booleans, self-intersecting
    sections) retry on jumped streams; the attempt count lands in the
    record metadata.
    """
    if family not in _DRAWERS:
        raise ShapeForgeError(f"unknown family {family!r}")
    last_error = None
    for attempt in range(MAX_ATTEMPTS):
        rng = rng_for_seed(seed, stream=attempt * 7 + 1)
        try:
            op_local, meta = _DRAWERS[family](rng, cfg)
            op, mesh_local, factor, loc, target = _place(op_local, rng, cfg)
            if family == "boolean" and not mesh_local.watertight:
                raise GeometryFailure("boolean result is not manifold")
            if mesh_local.is_empty:
                raise GeometryFailure("empty result")
            lo_l, hi_l = mesh_bbox(mesh_local)
            lo = lo_l * factor + loc
            hi = hi_l * factor + loc
            longest = float((hi - lo).max())
            if np.any(lo < -1.0) or np.any(hi > 1.0) or not (1.0 <= longest <= 2.0):
                raise GeometryFailure("placement bounds violated")
            if family == "boolean":
                min_vol = cfg.family_config("boolean").merged_ranges()["min_result_volume"]
                from ..geometry.mesh import signed_volume

                if abs(signed_volume(mesh_local)) * factor**3 < min_vol:
                    raise GeometryFailure("boolean result nearly empty")
            meta.update(
                {
                    "attempts": attempt + 1,
                    "edge_target": float(target),
                    "rescale": float(factor),
                    "watertight": bool(mesh_local.watertight),
                }
            )
            program = ShapeProgram(
                object_name=f"{family}_{seed & 0xFFFFFFFFFFFFFFFF:016x}",
                object_category=family,
                parts=[PartStatement(family, 0, op)],
            )
            return SampleRecord(
                seed=seed,
                family=family,
                program=program,
                bbox=(_tuple3(lo), _tuple3(hi)),
                metadata=meta,
            )
        except (GeometryFailure, ShapeForgeError) as exc:
            last_error = exc
            continue
    raise PlacementFailure(
        f"family {family!r} seed {seed}: no valid draw in {MAX_ATTEMPTS} attempts "
        f"(last: {last_error})"
    )
