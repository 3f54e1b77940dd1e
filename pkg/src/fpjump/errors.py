"""Exception hierarchy shared across the toolkit.

The CLI maps these onto process exit codes: configuration problems exit
with 2, violated numerical preconditions with 3, and failed internal
consistency checks with 4.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 4


class ConfigError(ToolkitError):
    """Bad user input: unknown key, unparsable value, missing file."""

    exit_code = 2


class ExprSyntaxError(ConfigError):
    """Expression text could not be parsed.  Carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class PreconditionError(ToolkitError):
    """A numerical precondition does not hold for the requested run."""

    exit_code = 3


class DomainEvalError(PreconditionError):
    """Expression evaluation left the real domain (pole, sqrt of a
    negative number, overflow)."""


class CoefficientError(PreconditionError):
    """Coefficient values are unusable on the grid (non-finite, or a
    diffusion that drops below its claimed lower bound)."""


class CflError(PreconditionError):
    """Requested explicit step exceeds the stability limit dt*lam <= 1."""


class SeriesLengthError(PreconditionError):
    """Uniformization series would need more terms than allowed."""

    def __init__(self, required: int, allowed: int):
        super().__init__(
            f"uniformization series needs {required} terms, cap is {allowed}; "
            "raise the cap or shorten the time interval"
        )
        self.required = required
        self.allowed = allowed


class InternalCheckError(ToolkitError):
    """A result failed a consistency check that should hold by
    construction.  Indicates a bug or severe ill-conditioning."""

    exit_code = 4
