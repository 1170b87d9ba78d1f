"""Exception types shared across the package.

The CLI maps these onto exit codes: usage and configuration problems
exit 1, I/O failures exit 2 (plain OSError), data validation failures
exit 3, and scorer subprocess failures exit 4.
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(PipelineError):
    """Invalid configuration or unusable parameter combination."""


class ValidationError(PipelineError):
    """Input data violates a documented precondition."""


class ParseError(ValidationError):
    """A text format could not be parsed.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ScorerError(PipelineError):
    """An external scorer process failed, timed out, or misbehaved."""


class DecodeError(PipelineError):
    """Decoding a sentence failed.

    Carries the word position at which the failure occurred.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"position {position}: {message}"
        super().__init__(message)
        self.position = position
