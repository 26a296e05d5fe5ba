"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PrivmapError(Exception):
    """Base class for all package errors."""


class DomainError(PrivmapError):
    """A numeric input fell outside its documented domain."""


class CalibrationError(PrivmapError):
    """Training data cannot produce a valid model (empty class, degenerate
    boundaries, unachievable purity)."""


class InputError(PrivmapError):
    """A malformed sample or record was handed to the engine."""


class TraceFormatError(InputError):
    """A trace or model file failed to parse.

    Carries enough location detail to point at the offending line.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        location = ""
        if path is not None:
            location = f"{path}: "
        if line is not None:
            location = f"{location}line {line}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class ConfigError(PrivmapError):
    """A scenario or engine config file is invalid."""
