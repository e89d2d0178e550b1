"""Shared exception types, mapped to CLI exit codes (2 and 3)."""


class PreconditionError(ValueError):
    """An input violates a documented precondition."""


class NumericalError(RuntimeError):
    """A solve or continuation failed (non-convergence, ambiguous branch, resonance)."""
