"""
Exception hierarchy for the modular units toolkit.

Library code raises these; only the command line front end turns them into
messages and exit codes.
"""


class ModularUnitsError(Exception):
    """Base class for every error raised by the toolkit."""


class PreconditionError(ModularUnitsError, ValueError):
    """A mathematical precondition of an operation is violated."""


class GradingError(PreconditionError):
    """Two series with different two-pi weights were combined."""


class NotInRingError(PreconditionError):
    """A series is not a polynomial expression in the generators at the given precision."""


class PrecisionError(ModularUnitsError):
    """The requested quantity lies outside the known truncation window."""
