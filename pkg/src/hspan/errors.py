"""Exception hierarchy for hspan."""


class HspanError(Exception):
    """Base class for all library errors."""


class InvalidDomain(HspanError):
    pass


class DegenerateCurve(InvalidDomain):
    pass


class SelfIntersecting(InvalidDomain):
    pass


class MarkedPointsTooClose(InvalidDomain):
    pass


class SolveFailure(HspanError):
    pass


class IncompatibleData(HspanError):
    pass


class NearBoundary(HspanError):
    pass


class DegenerateSlit(HspanError):
    pass


class PoleOfF(HspanError):
    pass


class NotSimplyConnected(HspanError):
    pass


class NotNested(HspanError):
    pass


class BoundaryNotSmooth(HspanError):
    pass


class StencilOutOfDisk(HspanError):
    pass


class LineHitsDiagonal(HspanError):
    pass


class ExpressionError(HspanError):
    """Parse or evaluation error in a family expression.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
