"""Exception types shared across the pipeline.

The CLI maps these onto process exit codes (see ``sdsc.cli``).
"""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class ParseError(ValidationError):
    """A data file could not be parsed."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class InvariantError(RuntimeError):
    """An internal invariant was violated. Indicates a bug, not bad input."""
