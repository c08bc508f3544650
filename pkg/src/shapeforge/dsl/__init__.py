"""Shape-program language: types, parsing, printing, validation, retargeting."""

from .canon import quantize_op, quantize_program, quantize_statement
from .parser import parse_program, parse_statement
from .printer import print_program, format_op
from .retarget import retarget_op, retarget_statement
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
    SectionSpec,
    ShapeProgram,
    SimilarityTransform,
    TrajectorySpec,
    TranslationOp,
    canonical_float,
    format_number,
    trajectory_is_closed,
)
from .validate import validate_program

__all__ = [
    "ArcSection",
    "ArcTrajectory",
    "Array1DOp",
    "Array2DOp",
    "BezierSection",
    "BezierTrajectory",
    "BooleanOp",
    "BridgeLoopOp",
    "CircleSection",
    "CircleTrajectory",
    "Diagnostic",
    "FillGridOp",
    "LineTrajectory",
    "Op",
    "PartStatement",
    "PlacedSection",
    "PolygonSection",
    "PolylineTrajectory",
    "PrimitiveKind",
    "PrimitiveOp",
    "RectangleSection",
    "RectangleTrajectory",
    "RevolveOp",
    "SectionSpec",
    "ShapeProgram",
    "SimilarityTransform",
    "TrajectorySpec",
    "TranslationOp",
    "canonical_float",
    "format_number",
    "format_op",
    "parse_program",
    "parse_statement",
    "print_program",
    "quantize_op",
    "quantize_program",
    "quantize_statement",
    "retarget_op",
    "retarget_statement",
    "trajectory_is_closed",
    "validate_program",
]
