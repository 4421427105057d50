"""Exception types shared across cubepack."""


class CubepackError(Exception):
    """Base class for all cubepack errors."""


class InvalidVertex(CubepackError, ValueError):
    pass


class PlacementError(CubepackError, ValueError):
    """A placement map is malformed (not injective, out of range, wrong length)."""


class ParameterError(CubepackError, ValueError):
    pass


class SizingError(CubepackError, ValueError):
    """The host is too small for the requested construction.

    ``minimum`` carries the smallest admissible dimension when known.
    """

    def __init__(self, message, minimum=None):
        super().__init__(message)
        self.minimum = minimum


class BudgetExceeded(CubepackError, RuntimeError):
    pass


class ClassificationFailure(CubepackError):
    pass


class FormatError(CubepackError, ValueError):
    """A certificate or pattern file could not be parsed."""
