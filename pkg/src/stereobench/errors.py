"""Exception types shared across the toolkit."""


class StereobenchError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(StereobenchError, ValueError):
    """An argument violates a documented precondition."""


class SceneValidationError(InvalidInputError):
    """A scene description is geometrically or numerically unusable."""


class FormatError(StereobenchError, ValueError):
    """A file does not conform to its declared format.

    ``offset`` is the byte offset at which parsing failed, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class EstimationError(StereobenchError, RuntimeError):
    """A fit or estimate could not be produced from the given data."""


class DegenerateGeometryError(EstimationError):
    """The sample geometry does not constrain the model parameters."""
