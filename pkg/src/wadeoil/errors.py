"""Exception hierarchy for the wadeoil package."""


class WadeError(Exception):
    """Base class for all package errors."""


class ValidationError(WadeError, ValueError):
    """Invalid parameters or inputs."""


class GridMismatch(ValidationError):
    """Series that must share a grid do not."""


class SingularPrice(WadeError, ArithmeticError):
    """Price too close to the win-win pivot for the closed forms to be evaluated.

    ``index`` and ``t`` locate the offending grid node when known.
    """

    def __init__(self, price, pivot, band, index=None, t=None):
        self.price = price
        self.pivot = pivot
        self.band = band
        self.index = index
        self.t = t
        where = ""
        if index is not None:
            where = f" at node {index}"
            if t is not None:
                where += f" (t={t:g})"
        super().__init__(
            f"price {price:g} lies within {band:g} of pivot {pivot:g}{where}"
        )


class NonRealRoot(WadeError, ArithmeticError):
    """Even root of a negative number requested."""


class DataError(ValidationError):
    """Malformed input data file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateYear(DataError):
    pass
