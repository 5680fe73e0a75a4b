"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A user-supplied parameter is outside its documented domain."""


class UnsupportedKindError(TypeError):
    """Operation applied to a graph kind it does not support."""


class EdgeListParseError(ValueError):
    """Malformed edge-list input; carries the offending line number when known."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ContractError(RuntimeError):
    """Internal contract violated (dimension mismatch, out-of-prefix read, ...)."""


class SizeLimitError(ValueError):
    """Instance exceeds the size limit of an exhaustive routine."""
