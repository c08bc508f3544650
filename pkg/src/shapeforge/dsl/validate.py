"""Structural validation of shape-program ASTs.

``validate_program`` never raises; it returns a list of diagnostics, empty
iff every type invariant holds. Errors flag invariant violations; warnings
flag parts whose conservative size estimate exceeds the configured world
bound.
"""

from __future__ import annotations

import math

import numpy as np

from ..geom2d import catmull_rom, is_simple_closed
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
    PolygonSection,
    PolylineTrajectory,
    PrimitiveOp,
    RectangleSection,
    RectangleTrajectory,
    RevolveOp,
    ShapeProgram,
    SimilarityTransform,
    TranslationOp,
)

# Quaternions written with 6 significant digits carry ~1e-6 norm error, so
# the unit-norm check runs at a tolerance compatible with program text.
ROTATION_NORM_TOL = 2e-5

DEFAULT_WORLD_BOUND = 10.0

FULL_TURN_TOL = 1e-5


def _span_of(part):
    return part.span if part.span else ((0, 0), (0, 0))


class _Checker:
    def __init__(self, world_bound: float):
        self.world_bound = world_bound
        self.diags: list[Diagnostic] = []
        self.span = ((0, 0), (0, 0))

    def err(self, msg: str):
        self.diags.append(Diagnostic("error", self.span, msg))

    def warn(self, msg: str):
        self.diags.append(Diagnostic("warning", self.span, msg))

    # -- pieces ----------------------------------------------------------

    def transform(self, t: SimilarityTransform):
        if any(s <= 0 for s in t.scale):
            self.err("scale components > 0 required")
        norm = math.sqrt(sum(c * c for c in t.rotation))
        if abs(norm - 1.0) > ROTATION_NORM_TOL:
            self.err(f"rotation must be a unit quaternion (norm {norm:.8f})")

    def section(self, s, require_positive_side=None):
        if isinstance(s, RectangleSection):
            if s.width <= 0 or s.height <= 0:
                self.err("rectangle section needs width, height > 0")
        elif isinstance(s, CircleSection):
            if s.radius <= 0:
                self.err("circle section needs radius > 0")
            if s.resolution < 3:
                self.err("circle section needs resolution >= 3")
        elif isinstance(s, ArcSection):
            if s.radius <= 0:
                self.err("arc section needs radius > 0")
            if abs(s.end_angle - s.start_angle) < 1e-9:
                self.err("arc section needs a nonzero angular span")
            if abs(s.end_angle - s.start_angle) > 2 * math.pi - 1e-9:
                self.err("arc section span must stay below a full turn")
            if s.resolution < 2:
                self.err("arc section needs resolution >= 2")
        elif isinstance(s, PolygonSection):
            if len(s.points) < 3:
                self.err("polygon section needs at least 3 vertices")
            elif not is_simple_closed(np.asarray(s.points)):
                self.err("polygon section must be a simple closed curve")
        elif isinstance(s, BezierSection):
            if len(s.points) < (3 if s.closed else 2):
                self.err("bezier section needs at least 3 anchors when closed, 2 otherwise")
            elif s.resolution < 1:
                self.err("bezier section needs resolution >= 1")
            else:
                sampled = catmull_rom(
                    np.asarray(s.points), s.resolution, s.closed
                )
                if not s.closed:
                    sampled = np.concatenate([sampled], axis=0)
                if not is_simple_closed(sampled):
                    self.err("bezier section must be a simple closed curve after closure")
        else:
            self.err(f"unknown section {s!r}")

    def trajectory(self, t):
        if isinstance(t, LineTrajectory):
            if _dist(t.start, t.end) < 1e-12:
                self.err("line trajectory endpoints must be distinct")
        elif isinstance(t, PolylineTrajectory):
            if len(t.points) < 2:
                self.err("polyline trajectory needs at least 2 points")
            else:
                for a, b in zip(t.points, t.points[1:]):
                    if _dist(a, b) < 1e-12:
                        self.err("polyline trajectory has coincident consecutive points")
                        break
        elif isinstance(t, CircleTrajectory):
            if t.radius <= 0:
                self.err("circle trajectory needs radius > 0")
            if _norm(t.axis) < 1e-12:
                self.err("circle trajectory needs a nonzero axis")
            if t.resolution < 3:
                self.err("circle trajectory needs resolution >= 3")
        elif isinstance(t, ArcTrajectory):
            if t.radius <= 0:
                self.err("arc trajectory needs radius > 0")
            if _norm(t.axis) < 1e-12:
                self.err("arc trajectory needs a nonzero axis")
            if abs(t.end_angle - t.start_angle) < 1e-9:
                self.err("arc trajectory needs a nonzero angular span")
            if t.resolution < 2:
                self.err("arc trajectory needs resolution >= 2")
        elif isinstance(t, RectangleTrajectory):
            if t.width <= 0 or t.height <= 0:
                self.err("rectangle trajectory needs width, height > 0")
            if _norm(t.axis_u) < 1e-12 or _norm(t.axis_v) < 1e-12:
                self.err("rectangle trajectory needs nonzero axes")
            elif _norm(np.cross(t.axis_u, t.axis_v)) < 1e-12:
                self.err("rectangle trajectory axes must be linearly independent")
        elif isinstance(t, BezierTrajectory):
            if len(t.points) < 2:
                self.err("bezier trajectory needs at least 2 anchors")
            else:
                for a, b in zip(t.points, t.points[1:]):
                    if _dist(a, b) < 1e-12:
                        self.err("bezier trajectory has coincident consecutive anchors")
                        break
            if t.resolution < 1:
                self.err("bezier trajectory needs resolution >= 1")
        else:
            self.err(f"unknown trajectory {t!r}")

    def op(self, op):
        if isinstance(op, PrimitiveOp):
            k = op.kind
            if k.name in ("cylinder", "cone", "uv_sphere") and k.segments < 3:
                self.err("segment counts >= 3 required")
            if k.name == "uv_sphere" and k.rings < 3:
                self.err("uv_sphere needs rings >= 3")
            if k.name == "torus":
                if k.major_segments < 3 or k.minor_segments < 3:
                    self.err("segment counts >= 3 required")
                if k.minor_radius <= 0:
                    self.err("torus needs minor_radius > 0")
        elif isinstance(op, TranslationOp):
            self.section(op.section)
            self.trajectory(op.trajectory)
            prof = op.scale_profile
            if not prof:
                self.err("scale_profile must not be empty")
            else:
                ts = [t for t, _ in prof]
                if any(t < 0 or t > 1 for t in ts):
                    self.err("scale_profile keys must lie in [0, 1]")
                if any(b <= a for a, b in zip(ts, ts[1:])):
                    self.err("scale_profile keys must be strictly increasing")
                if any(s <= 0 for _, s in prof):
                    self.err("scale_profile values must be > 0")
        elif isinstance(op, RevolveOp):
            self.section(op.section)
            if _norm(op.axis_dir) < 1e-12:
                self.err("revolve needs a nonzero axis direction")
            if not (0 < op.angle <= 2 * math.pi + FULL_TURN_TOL):
                self.err("revolve angle must lie in (0, 2*pi]")
            if op.steps < 3:
                self.err("revolve needs steps >= 3")
            min_u = _section_min_u(op.section) + op.offset[0]
            if min_u <= 0:
                self.err("revolve section must lie strictly on one side of the axis")
        elif isinstance(op, BridgeLoopOp):
            if len(op.loops) < 2:
                self.err("bridge_loop needs at least 2 loops")
            for loop in op.loops:
                self.section(loop.section)
                if loop.scale <= 0:
                    self.err("bridge loop scale must be > 0")
                norm = math.sqrt(sum(c * c for c in loop.rotation))
                if abs(norm - 1.0) > ROTATION_NORM_TOL:
                    self.err("bridge loop rotation must be a unit quaternion")
        elif isinstance(op, BooleanOp):
            if len(op.operands) < 2:
                self.err("boolean needs at least 2 operands")
            for sub in op.operands:
                self.op(sub)
        elif isinstance(op, Array1DOp):
            if op.count < 1:
                self.err("array count must be >= 1")
            self.trajectory(op.trajectory)
            self.op(op.proto)
        elif isinstance(op, Array2DOp):
            if op.counts[0] < 1 or op.counts[1] < 1:
                self.err("array counts must be >= 1")
            if op.spacings[0] <= 0 or op.spacings[1] <= 0:
                self.err("array spacings must be > 0")
            if _norm(op.basis_u) < 1e-12 or _norm(op.basis_v) < 1e-12 or _norm(
                np.cross(op.basis_u, op.basis_v)
            ) < 1e-12:
                self.err("array basis vectors must be linearly independent")
            self.op(op.proto)
        elif isinstance(op, FillGridOp):
            if len(op.boundary) < 3:
                self.err("fill_grid boundary needs at least 3 points")
            else:
                for a, b in zip(op.boundary, op.boundary[1:]):
                    if _dist(a, b) < 1e-12:
                        self.err("fill_grid boundary has coincident consecutive points")
                        break
            if op.thickness <= 0:
                self.err("fill_grid thickness must be > 0")
        else:
            self.err(f"unknown op {op!r}")
        self.transform(op.transform)


def _norm(v) -> float:
    return math.sqrt(sum(c * c for c in v))


def _dist(a, b) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def _section_min_u(s) -> float:
    if isinstance(s, RectangleSection):
        return -s.width / 2
    if isinstance(s, (CircleSection, ArcSection)):
        return -s.radius
    if isinstance(s, (PolygonSection, BezierSection)):
        return min(p[0] for p in s.points) - (
            0.25 * _poly_extent(s.points) if isinstance(s, BezierSection) else 0.0
        )
    return 0.0


def _poly_extent(points) -> float:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return max(max(xs) - min(xs), max(ys) - min(ys))


def _rough_extent(op) -> float:
    """Conservative world-radius bound for the op's geometry (for warnings only)."""
    t = op.transform
    smax = max(t.scale)
    loc = _norm(t.location)

    if isinstance(op, PrimitiveOp):
        if op.kind.name == "torus":
            h = (1 + op.kind.minor_radius, 1 + op.kind.minor_radius, op.kind.minor_radius)
        else:
            h = (1.0, 1.0, 1.0)
        return loc + math.sqrt(sum((s * e) ** 2 for s, e in zip(t.scale, h)))

    if isinstance(op, TranslationOp):
        path = max((_norm(p) for p in _traj_points(op.trajectory)), default=0.0)
        local = path + _section_radius(op.section) * max(s for _, s in op.scale_profile)
    elif isinstance(op, RevolveOp):
        local = (
            _norm(op.axis_point)
            + _section_radius(op.section)
            + abs(op.offset[0])
            + abs(op.offset[1])
        )
    elif isinstance(op, BridgeLoopOp):
        local = max(
            _norm(l.location) + _section_radius(l.section) * l.scale for l in op.loops
        )
    elif isinstance(op, BooleanOp):
        local = max(_rough_extent(sub) for sub in op.operands)
    elif isinstance(op, Array1DOp):
        path = max((_norm(p) for p in _traj_points(op.trajectory)), default=0.0)
        local = path + _rough_extent(op.proto)
    elif isinstance(op, Array2DOp):
        local = (
            _rough_extent(op.proto)
            + op.counts[0] * op.spacings[0]
            + op.counts[1] * op.spacings[1]
        )
    elif isinstance(op, FillGridOp):
        local = max(_norm(p) for p in op.boundary) + op.thickness
    else:
        local = 2.0
    return loc + smax * local


def _traj_points(t):
    if isinstance(t, LineTrajectory):
        return [t.start, t.end]
    if isinstance(t, (PolylineTrajectory, BezierTrajectory)):
        return list(t.points)
    if isinstance(t, (CircleTrajectory, ArcTrajectory)):
        c = t.center
        return [(c[0] + t.radius, c[1] + t.radius, c[2] + t.radius)]
    if isinstance(t, RectangleTrajectory):
        c = t.center
        return [(c[0] + t.width + t.height, c[1], c[2])]
    return []


def _section_radius(s) -> float:
    if isinstance(s, RectangleSection):
        return _norm((s.width / 2, s.height / 2))
    if isinstance(s, (CircleSection, ArcSection)):
        return s.radius
    if isinstance(s, (PolygonSection, BezierSection)):
        return max(_norm(p) for p in s.points) * (1.5 if isinstance(s, BezierSection) else 1.0)
    return 1.0


def validate_program(
    p: ShapeProgram, world_bound: float = DEFAULT_WORLD_BOUND
) -> list[Diagnostic]:
    """Check all type invariants; returns diagnostics instead of raising."""
    checker = _Checker(world_bound)
    if not p.object_name:
        checker.err("object name must be non-empty")
    for i, part in enumerate(p.parts):
        checker.span = _span_of(part)
        if not part.part_name:
            checker.err("part names must be non-empty")
        if part.part_index != i:
            checker.err(
                f"part_index values must be 0..{len(p.parts) - 1} in listed order "
                f"(found {part.part_index} at position {i})"
            )
        checker.op(part.op)
        if _rough_extent(part.op) > checker.world_bound:
            # the cheap bound is conservative (boolean slivers rescale it far
            # past the real extent), so confirm against the executed bbox
            # before warning
            if _exceeds_world_bound(part.op, checker.world_bound):
                checker.warn(
                    f"part {part.part_name!r} bbox exceeds the world bound "
                    f"{checker.world_bound}"
                )
    return checker.diags


def _exceeds_world_bound(op, bound: float) -> bool:
    from ..geometry.execute import execute_op
    from ..geometry.mesh import mesh_bbox

    try:
        lo, hi = mesh_bbox(execute_op(op))
    except Exception:
        return True  # cannot confirm: keep the warning
    return bool(max(abs(lo).max(), abs(hi).max()) > bound)
