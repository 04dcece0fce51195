"""Exception types shared across the toolkit."""


class GsfillError(Exception):
    """Base class for all gsfill errors."""


class ParseError(GsfillError):
    """A file could not be parsed. Carries the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class SchemaError(GsfillError):
    """A file parsed but does not match the expected schema."""


class UnsupportedModel(GsfillError):
    """Camera model not supported by the loader."""


class InvalidArgument(GsfillError, ValueError):
    """An argument violates an operation's preconditions."""


class DegenerateDepth(GsfillError):
    """Depth map cannot be normalized or completed (constant or fully masked)."""


class BackendError(GsfillError):
    """A completion backend failed."""


class EmptyResult(GsfillError):
    """An operation that must produce at least one element produced none."""


class OptimizationDiverged(GsfillError):
    """Fine-tuning produced a non-finite loss. Carries the iteration index."""

    def __init__(self, message: str, iteration: int):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration
