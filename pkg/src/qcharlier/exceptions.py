"""Exception hierarchy for qcharlier."""


class QCharlierError(Exception):
    """Base class for all package errors."""


class InvalidParameters(QCharlierError, ValueError):
    """Raised when (q, a) or a size argument violates its domain."""


class NonTerminating(QCharlierError, ValueError):
    """A series declared terminating has no upper parameter equal to q**-n."""


class RangeOverflow(QCharlierError, OverflowError):
    """A result or intermediate quantity leaves the binary64 range."""


class TailTooLarge(QCharlierError):
    """A truncated sum's tail estimate exceeds the requested tolerance."""


class ConvergenceFailure(QCharlierError):
    """The eigensolver exhausted its iteration budget.

    ``index`` is the position of the eigenvalue that failed to converge.
    """

    def __init__(self, index, iterations):
        super().__init__(
            f"eigenvalue {index} did not converge within {iterations} iterations"
        )
        self.index = index
        self.iterations = iterations


class MatchAmbiguity(QCharlierError):
    """Two eigenvalues fall within the matching tolerance of one target."""
