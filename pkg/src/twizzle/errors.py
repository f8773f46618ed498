"""Exception types shared across the library."""


class TwizzleError(Exception):
    """Base class for all twizzle errors."""


class KindMismatch(TwizzleError):
    """Ambient vector does not match the spaceform's dimension or tag."""


class DomainError(TwizzleError):
    """Parameter outside a curve's or surface's domain."""


class CurvatureVanishes(TwizzleError):
    """Support parameterization requested on a curve with a vanishing-curvature point."""

    def __init__(self, u, message=None):
        self.u = u
        super().__init__(message or f"curvature vanishes near u = {u!r}")


class ConvexityViolation(TwizzleError):
    """Support function violates q + q'' > 0 somewhere on its domain."""


class DegenerateMetric(TwizzleError):
    """Surface metric is degenerate (sqrt(g) <= tolerance) at the evaluation point."""


class ZeroRadius(TwizzleError):
    """Shaving requested where the base point sits on the rotation axis."""


class SingularDenominator(TwizzleError):
    """Treadmill reconstruction hit interior zeros of x*x' + y*y'.

    The reconstruction is still performed arcwise; the pieces are attached
    to the exception so callers may keep partial results.
    """

    def __init__(self, split_indices, arcs=None):
        self.split_indices = list(split_indices)
        self.arcs = arcs or []
        super().__init__(
            f"denominator x*x' + y*y' vanishes at sample indices {self.split_indices}"
        )


class NonMonotoneArclength(TwizzleError):
    """Recovered speed s' <= 0: the path is not the treadmill of an immersed curve."""


class EmptyLevelSet(TwizzleError):
    """No point of the CMC level set was found in the probe region."""


class NoRoot(TwizzleError):
    """Conservation equation has no kinematically admissible root at the current point."""


class AxisTouch(TwizzleError):
    """Integration reached the rotation axis (|gamma| -> 0 or profile f -> 0)."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)
