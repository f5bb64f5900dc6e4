"""Exception hierarchy shared by every module."""


class MixedMomentsError(Exception):
    """Base class for all errors raised by this package."""


class EmptySpaceError(MixedMomentsError, ValueError):
    """The requested space of cusp forms is zero-dimensional."""


class DegenerateSpectrumError(MixedMomentsError):
    """Hecke eigenvalues are too close to separate reliably."""


class PoleError(MixedMomentsError, ValueError):
    """A function was evaluated at one of its poles."""


class RangeError(MixedMomentsError, ValueError):
    """Argument outside the range where the routine is accurate."""


class AccuracyError(MixedMomentsError):
    """A quadrature or series failed to reach its tolerance."""


class DataExhaustedError(MixedMomentsError):
    """A coefficient table does not reach the index a computation needs."""

    def __init__(self, needed: int, available: int, what: str = "coefficients"):
        self.needed = needed
        self.available = available
        super().__init__(f"{what} needed up to n = {needed}, only {available} available")


class DeligneViolationError(MixedMomentsError):
    """|lambda_f(p)| exceeds 2; signals an upstream numerical bug."""


class AnomalyError(MixedMomentsError):
    """A value violates a sign or positivity constraint."""


class DataIntegrityError(MixedMomentsError, ValueError):
    """Ingested data failed a validation check."""


class ParseError(MixedMomentsError, ValueError):
    """Malformed line in an input file."""

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")
