"""
Exception types for the VoI toolkit
Each carries the process exit status the CLI reports
"""

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_ARITHMETIC = 4


class VoiError(Exception):
    """Base error: a human-readable detail plus the exit status for the CLI."""

    exit_code = EXIT_USAGE

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class UsageError(VoiError):
    """Unknown measurement, malformed grid or deltas, unwritable output."""

    exit_code = EXIT_USAGE


class ProblemFileError(VoiError):
    """Problem document could not be parsed (syntax or schema)."""

    exit_code = EXIT_PARSE


class InvalidInputError(VoiError):
    """Inputs parse but violate a model invariant."""

    exit_code = EXIT_VALIDATION


class ArithmeticFault(VoiError):
    """A value that is non-negative analytically came out clearly negative."""

    exit_code = EXIT_ARITHMETIC
