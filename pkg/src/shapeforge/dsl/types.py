"""AST node types for the shape-program language.

A program is an ordered list of part statements. Each statement is one
construction operation (primitive, sweep, revolve, bridge, boolean, array,
fill-grid) carrying its own similarity transform, which is applied last
(scale, then rotate, then translate). Nodes are plain frozen dataclasses
holding Python numbers and tuples only, so structural equality and hashing
work out of the box; geometry code converts to numpy at the boundary.

Float parameters destined for program text are canonicalized to the
shortest decimal within 6 significant digits (see :func:`canonical_float`)
so that printing and re-parsing a program reproduces the identical AST.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]  # scalar-first (w, x, y, z)

# Span of source text: ((line, col), (line, col)), 1-based, end-inclusive.
Span = tuple[tuple[int, int], tuple[int, int]]

PRIMITIVE_KINDS = ("cube", "cylinder", "uv_sphere", "cone", "torus")
BOOLEAN_OPS = ("union", "intersection", "difference")


def canonical_float(x: float) -> float:
    """Round ``x`` to the value of its shortest 6-significant-digit decimal.

    ``-0.0`` normalizes to ``0.0``. Fixed point of the canonical printer:
    ``float(format_number(canonical_float(x))) == canonical_float(x)``.
    """
    if x == 0.0:
        return 0.0
    return float(f"{x:.6g}")


def format_number(x) -> str:
    """Canonical textual form of a number: ints verbatim, floats at 6 sig digits."""
    if isinstance(x, bool):
        return "True" if x else "False"
    if isinstance(x, int):
        return str(x)
    if x == 0.0:
        return "0"
    s = f"{x:.6g}"
    return s


@dataclass(frozen=True)
class SimilarityTransform:
    """Placement of a shape: per-axis scale, then rotation, then translation.

    ``rotation`` is a scalar-first unit quaternion; callers normalize before
    building rotation matrices since textual quantization perturbs the norm
    at the 1e-6 level.
    """

    location: Vec3 = (0.0, 0.0, 0.0)
    rotation: Quat = (1.0, 0.0, 0.0, 0.0)
    scale: Vec3 = (1.0, 1.0, 1.0)

    def is_identity(self) -> bool:
        return (
            self.location == (0.0, 0.0, 0.0)
            and self.rotation == (1.0, 0.0, 0.0, 0.0)
            and self.scale == (1.0, 1.0, 1.0)
        )


IDENTITY = SimilarityTransform()


@dataclass(frozen=True)
class PrimitiveKind:
    """One of the five canonical primitives plus its resolution parameters.

    Only the parameters relevant to ``name`` are meaningful (and printed):
    cylinder/cone use ``segments``; uv_sphere uses ``segments`` and
    ``rings``; torus uses ``major_segments``, ``minor_segments`` and
    ``minor_radius``. The cube has no resolution parameters.
    """

    name: str
    segments: int = 32
    rings: int = 16
    major_segments: int = 48
    minor_segments: int = 12
    minor_radius: float = 0.25


# --- 2D section curves ------------------------------------------------------


@dataclass(frozen=True)
class RectangleSection:
    width: float
    height: float


@dataclass(frozen=True)
class CircleSection:
    radius: float
    resolution: int = 32


@dataclass(frozen=True)
class ArcSection:
    """Circular arc, closed by the chord (default) or through the center."""

    radius: float
    start_angle: float
    end_angle: float
    chord_closed: bool = True
    resolution: int = 24


@dataclass(frozen=True)
class PolygonSection:
    points: tuple[Vec2, ...]


@dataclass(frozen=True)
class BezierSection:
    """Smooth cubic spline through anchor points with auto tangents."""

    points: tuple[Vec2, ...]
    closed: bool = True
    resolution: int = 12


SectionSpec = Union[
    RectangleSection, CircleSection, ArcSection, PolygonSection, BezierSection
]


# --- 3D trajectory curves ---------------------------------------------------


@dataclass(frozen=True)
class LineTrajectory:
    start: Vec3
    end: Vec3


@dataclass(frozen=True)
class PolylineTrajectory:
    points: tuple[Vec3, ...]


@dataclass(frozen=True)
class CircleTrajectory:
    center: Vec3
    axis: Vec3
    radius: float
    resolution: int = 64


@dataclass(frozen=True)
class ArcTrajectory:
    center: Vec3
    axis: Vec3
    radius: float
    start_angle: float
    end_angle: float
    resolution: int = 48


@dataclass(frozen=True)
class RectangleTrajectory:
    center: Vec3
    axis_u: Vec3
    axis_v: Vec3
    width: float
    height: float


@dataclass(frozen=True)
class BezierTrajectory:
    points: tuple[Vec3, ...]
    resolution: int = 16


TrajectorySpec = Union[
    LineTrajectory,
    PolylineTrajectory,
    CircleTrajectory,
    ArcTrajectory,
    RectangleTrajectory,
    BezierTrajectory,
]

CLOSED_TRAJECTORIES = (CircleTrajectory, RectangleTrajectory)


def trajectory_is_closed(t: TrajectorySpec) -> bool:
    return isinstance(t, CLOSED_TRAJECTORIES)


@dataclass(frozen=True)
class PlacedSection:
    """A 2D section positioned in 3D space (for bridge loops)."""

    section: SectionSpec
    location: Vec3 = (0.0, 0.0, 0.0)
    rotation: Quat = (1.0, 0.0, 0.0, 0.0)
    scale: float = 1.0


# --- Operations -------------------------------------------------------------


@dataclass(frozen=True)
class PrimitiveOp:
    kind: PrimitiveKind
    transform: SimilarityTransform = IDENTITY


@dataclass(frozen=True)
class TranslationOp:
    """Sweep a 2D section along a 3D trajectory with an optional scale profile."""

    section: SectionSpec
    trajectory: TrajectorySpec
    scale_profile: tuple[tuple[float, float], ...] = ((0.0, 1.0), (1.0, 1.0))
    transform: SimilarityTransform = IDENTITY


@dataclass(frozen=True)
class RevolveOp:
    """Rotate a section around an axis to form a solid of revolution.

    Section coordinates (u, v), shifted by ``offset``, map to (radial
    offset, axis offset); the shifted section must lie strictly on the
    positive-u side of the axis.
    """

    section: SectionSpec
    offset: Vec2 = (0.0, 0.0)
    axis_point: Vec3 = (0.0, 0.0, 0.0)
    axis_dir: Vec3 = (0.0, 0.0, 1.0)
    angle: float = 6.28319
    steps: int = 64
    transform: SimilarityTransform = IDENTITY


@dataclass(frozen=True)
class BridgeLoopOp:
    loops: tuple[PlacedSection, ...]
    cap_start: bool = True
    cap_end: bool = True
    transform: SimilarityTransform = IDENTITY


@dataclass(frozen=True)
class BooleanOp:
    op: str  # union | intersection | difference
    operands: tuple["Op", ...]
    transform: SimilarityTransform = IDENTITY


@dataclass(frozen=True)
class Array1DOp:
    proto: "Op"
    trajectory: TrajectorySpec
    count: int
    transform: SimilarityTransform = IDENTITY


@dataclass(frozen=True)
class Array2DOp:
    proto: "Op"
    basis_u: Vec3
    basis_v: Vec3
    counts: tuple[int, int]
    spacings: tuple[float, float]
    transform: SimilarityTransform = IDENTITY


@dataclass(frozen=True)
class FillGridOp:
    """Triangulate a closed 3D boundary and extrude it along its normal."""

    boundary: tuple[Vec3, ...]
    thickness: float
    transform: SimilarityTransform = IDENTITY


Op = Union[
    PrimitiveOp,
    TranslationOp,
    RevolveOp,
    BridgeLoopOp,
    BooleanOp,
    Array1DOp,
    Array2DOp,
    FillGridOp,
]


@dataclass
class PartStatement:
    """One named, indexed construction statement of a program."""

    part_name: str
    part_index: int
    op: Op
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    @property
    def transform(self) -> SimilarityTransform:
        return self.op.transform


@dataclass
class ShapeProgram:
    object_name: str
    object_category: str = ""
    parts: list[PartStatement] = field(default_factory=list)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    span: Span
    message: str

    def __str__(self) -> str:
        (l0, c0), _ = self.span
        return f"{self.severity} at {l0}:{c0}: {self.message}"


def error(message: str, span: Span = ((0, 0), (0, 0))) -> Diagnostic:
    return Diagnostic("error", span, message)


def warning(message: str, span: Span = ((0, 0), (0, 0))) -> Diagnostic:
    return Diagnostic("warning", span, message)
