"""Exception hierarchy shared across the toolkit.

Errors split into three families that map onto CLI exit codes:
usage problems are raised by argument handling itself, DataError
covers malformed or inconsistent input data (exit code 2), and
NumericError covers numeric failures such as diverging optimisation
or non-finite intermediate values (exit code 3).
"""


class LobcastError(Exception):
    """Base class for all toolkit errors."""


class DataError(LobcastError):
    """Malformed, inconsistent, or out-of-contract input data."""


class StreamError(DataError):
    """Event stream violates its format contract (header, ordering)."""


class UndefinedMidError(DataError):
    """Mid-price requested from a book with an empty side."""


class WarmupError(DataError):
    """Feature requested for a block without enough history."""


class NumericError(LobcastError):
    """Numeric failure: divergence, overflow, non-finite values."""


class DivergenceError(NumericError):
    """Training loss exceeded the divergence guard threshold."""


class NotFittedError(LobcastError):
    """Estimator used before fit."""
