"""Exception hierarchy for the ball-body kernel."""


class BallBodyError(Exception):
    """Base class for all kernel errors."""


class DimensionError(BallBodyError, ValueError):
    """Mismatched or unsupported dimension."""


class GridMismatch(BallBodyError, ValueError):
    """Two samples live on different sphere grids."""


class EmptyBody(BallBodyError):
    """The generator set has circumradius > 1, so the intersection of unit balls is empty."""


class NotBallBody(BallBodyError):
    """A support sample violates the width bound h(u) + h(-u) <= 2 of the class."""


class DegenerateError(BallBodyError, ValueError):
    """Geometrically degenerate input (coincident circles, affinely dependent points)."""


class RankError(DegenerateError):
    """Point set does not span the ambient space affinely."""


class ConvergenceError(BallBodyError, RuntimeError):
    """An iterative solver hit its iteration cap without converging."""


class NotApplicable(BallBodyError):
    """A construction's preconditions do not hold for this input."""


class MalformedArcs(BallBodyError, ValueError):
    """Arc chain is not closed, not convex, or not counterclockwise."""


class OracleError(BallBodyError):
    """A transform oracle returned something that is not a valid body."""


class FormatError(BallBodyError, ValueError):
    """A body or report file could not be parsed."""
