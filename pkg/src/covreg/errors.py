"""Exception hierarchy.

Every error carries a ``category`` drawn from a fixed vocabulary so the CLI
can report failures in a machine-parseable way and pick an exit code.
"""

CATEGORIES = ("io", "parse", "dimension", "singular", "domain")


class CovregError(Exception):
    """Base class for all errors raised by the package."""

    category = "domain"


class SingularMatrix(CovregError):
    """A matrix failed the relative pivot gate and cannot be inverted."""

    category = "singular"


class DimensionMismatch(CovregError, ValueError):
    category = "dimension"


class TooFewObservations(CovregError, ValueError):
    category = "dimension"


class InvalidScenario(CovregError, ValueError):
    category = "dimension"


class ZeroVariance(CovregError, ValueError):
    category = "domain"


class NonStationaryModel(CovregError, ValueError):
    category = "domain"


class InputFileNotFound(CovregError, FileNotFoundError):
    category = "io"


class ColumnNotFound(CovregError, KeyError):
    category = "io"

    def __str__(self):
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ""


class ParseError(CovregError, ValueError):
    category = "parse"

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
