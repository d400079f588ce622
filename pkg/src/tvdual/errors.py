"""Exception hierarchy shared by every tvdual module."""

from __future__ import annotations


class TvdualError(Exception):
    """Base class for all errors raised by tvdual."""


class PreconditionError(TvdualError, ValueError):
    """An operation was called on input that violates its contract.

    ``precondition`` names the violated check (for instance ``"is_measurable"``)
    so callers such as the CLI can report it verbatim.
    """

    def __init__(self, precondition: str, message: str):
        super().__init__(f"{precondition}: {message}")
        self.precondition = precondition
        self.detail = message


class InternalDefect(TvdualError, RuntimeError):
    """An internal invariant failed. This is a bug, never a user error."""


class InstanceError(TvdualError, ValueError):
    """Malformed instance file; ``position`` locates the offending value."""

    def __init__(self, position: str, message: str):
        super().__init__(f"{position}: {message}")
        self.position = position
        self.detail = message
