"""Exception hierarchy for grid compilation, simulation and pipeline failures."""


class QGPError(ValueError):
    """Base class for all errors raised by qgridpath."""


class InvalidGrid(QGPError):
    pass


class DimensionTooSmall(InvalidGrid):
    pass


class EndpointMisplaced(InvalidGrid):
    pass


class MissingCost(InvalidGrid):
    pass


class NonPositiveCost(InvalidGrid):
    pass


class NodeOutOfRange(QGPError):
    pass


class WrongStructureClass(QGPError):
    pass


class IncompleteAssignment(QGPError):
    pass


class UnmappedVariable(QGPError):
    pass


class BasisOutOfRange(QGPError):
    pass


class TooManyQubits(QGPError):
    pass


class LayoutMismatch(QGPError):
    pass


class LengthMismatch(QGPError):
    pass


class AllFiltered(QGPError):
    """Every entry of the distribution sits at or below the filter threshold."""


class AllZero(QGPError):
    """A distribution that must be normalized sums to zero."""


class MalformedKet(QGPError):
    pass


class TooLarge(QGPError):
    pass


class NoFeasiblePath(QGPError):
    pass
