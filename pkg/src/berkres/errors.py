"""Exception types.  ``exit_code`` is what the command line reports."""


class BerkresError(Exception):
    exit_code = 5


class ParseError(BerkresError, ValueError):
    exit_code = 1


class DegeneratePairError(BerkresError, ArithmeticError):
    """The resultant vanishes: the pair is not a morphism."""

    exit_code = 2


class InconclusiveDomainError(BerkresError):
    """No semistable point was found on the supplied search domain."""

    exit_code = 3


class PrecisionError(BerkresError, ArithmeticError):
    """A truncated computation did not stabilize."""

    exit_code = 4


class RefineGridError(PrecisionError):
    """Slope data is unstable on the grid; ``interval`` needs a finer grid."""

    def __init__(self, message: str, interval=None):
        super().__init__(message)
        self.interval = interval


class ConvexityError(BerkresError):
    """Grid values failed discrete convexity (an internal inconsistency)."""


class ResampleError(BerkresError):
    """The chosen target point was not generic for the count requested."""


class UnsupportedError(BerkresError):
    """The operation is outside what the backend or construction supports."""
