"""Exception hierarchy.

The CLI maps ``DataError`` to exit code 2 and ``NumericError`` to exit code 3.
"""


class SemicommError(Exception):
    """Base class for all errors raised by this package."""


class DataError(SemicommError):
    """Malformed or inconsistent input data."""


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CoverageError(DataError):
    """A partition does not cover the nodes it is required to cover."""

    def __init__(self, message, missing=()):
        self.missing = tuple(missing)
        super().__init__(message)


class ContradictionError(DataError):
    """Constraints force some pair to be both must-link and cannot-link."""

    def __init__(self, triples):
        self.triples = list(triples)
        shown = ", ".join(f"({i + 1},{t + 1},{k + 1})" for i, t, k in self.triples[:5])
        more = "" if len(self.triples) <= 5 else f" (+{len(self.triples) - 5} more)"
        super().__init__(
            f"{len(self.triples)} contradictory constraint triple(s) (1-based): {shown}{more}"
        )


class GenerationError(DataError):
    """A benchmark graph could not be generated with the requested parameters."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            detail = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} [{detail}]"
        super().__init__(message)


class ExperimentError(SemicommError):
    """Too many trials of an experiment failed."""


class NumericError(SemicommError):
    """A numerical routine failed to converge or produced an invalid result."""
