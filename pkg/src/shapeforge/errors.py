"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ShapeForgeError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ShapeForgeError):
    """Invalid run or sampler configuration."""


class ParseError(ShapeForgeError):
    """Source text violates the program grammar.

    Carries the first offending :class:`~shapeforge.dsl.types.Diagnostic`.
    """

    def __init__(self, diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class ValidationError(ShapeForgeError):
    """A structurally well-formed AST violates type invariants."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        msgs = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(msgs)


class GeometryError(ShapeForgeError):
    """Base class for mesh-construction failures."""


class InvalidResolution(GeometryError):
    pass


class SelfIntersection(GeometryError):
    pass


class DegenerateTangent(GeometryError):
    pass


class SectionCrossesAxis(GeometryError):
    pass


class LoopCountMismatch(GeometryError):
    pass


class NonWatertightInput(GeometryError):
    pass


class RobustnessFailure(GeometryError):
    """CSG output failed the manifold check even after repair."""


class DegenerateBasis(GeometryError):
    pass


class NonSimpleProjection(GeometryError):
    pass


class NonWatertight(GeometryError):
    """Operation requires a watertight mesh."""


class EmptyMesh(GeometryError):
    pass


class DegenerateExtent(GeometryError):
    pass


class EmptyCloud(ShapeForgeError):
    pass


class FrameMismatch(ShapeForgeError):
    """Occupancy grids disagree on resolution or bounding frame."""


class NonUniformRescaleOfRotated(ShapeForgeError):
    """Transform composition would leave the similarity class."""


class PlacementFailure(ShapeForgeError):
    """Bounded rejection sampling could not place a shape."""


class GeometryFailure(ShapeForgeError):
    """Sampled parameters produced unusable geometry."""


class MissingCode(ShapeForgeError):
    """A part instance lacks inferred code during assembly."""

    def __init__(self, part_label):
        self.part_label = part_label
        super().__init__(f"part {part_label!r} has no inferred code")


class ExecutionError(ShapeForgeError):
    """Program execution failed at a specific part."""

    def __init__(self, part_index, cause):
        self.part_index = part_index
        self.cause = cause
        super().__init__(f"part {part_index} failed: {cause}")
