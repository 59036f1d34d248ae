"""
Exception types shared by every package.

Library code raises these; only main.py turns them into exit codes.
"""

from __future__ import annotations

from typing import Any


class GNCDEError(Exception):
    """Base class for all errors raised by this project."""

    exit_code = 1


class UsageError(GNCDEError):
    """Unknown subcommand, flag or configuration key."""

    exit_code = 2


class ValidationError(GNCDEError):
    """Malformed topology, configuration, file or tensor shape."""

    exit_code = 3


class NumericAbortError(GNCDEError):
    """A NaN or Inf appeared in a loss, a gradient or the integrated state."""

    exit_code = 4

    def __init__(self, message: str, **context: Any):
        self.context = context
        if context:
            details = ", ".join(f"{key}={value}" for key, value in context.items())
            message = f"{message} ({details})"
        super().__init__(message)
