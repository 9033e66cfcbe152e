"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so the CLI can map
them to a dedicated exit code.
"""


class QJDRError(Exception):
    """Base class for all package errors."""


class NumericalError(QJDRError, ArithmeticError):
    pass


class NotHermitian(QJDRError, ValueError):
    pass


class NoConvergence(NumericalError):
    pass


class DimensionMismatch(QJDRError, ValueError):
    pass


class ElementCountMismatch(QJDRError, ValueError):
    pass


class ParamLengthMismatch(QJDRError, ValueError):
    pass


class InvalidState(QJDRError, ValueError):
    """Raised when an operator fails density-matrix or POVM validation."""


class CutoffTooSmall(NumericalError):
    pass


class TruncationRisk(NumericalError):
    pass


class DegenerateEnsemble(NumericalError):
    pass


class IndexOutOfRange(QJDRError, IndexError):
    pass


class ConfigError(QJDRError, ValueError):
    pass


class CodebookParseError(ConfigError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")
