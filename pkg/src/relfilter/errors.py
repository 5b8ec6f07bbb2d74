"""Exception hierarchy shared by all relfilter modules."""


class RelfilterError(Exception):
    """Base class for all errors raised by this package."""


class ManifestParseError(RelfilterError):
    """A manifest line could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(RelfilterError):
    """Input violates a structural invariant (duplicate ids, unknown ids, ...)."""


class ParameterError(RelfilterError):
    """A hyperparameter or option is outside its valid range."""


class ShapeError(RelfilterError):
    """Vector dimensions do not match."""


class StoreFormatError(RelfilterError):
    """A feature-store file is malformed (bad magic, truncation, dim mismatch)."""


class DataError(RelfilterError):
    """Input data is unusable (NaN features, undecodable image, empty raster)."""


class EmptyDatasetError(RelfilterError):
    """An operation requires at least one record."""


class DegenerateTrainingError(RelfilterError):
    """Training data contains only one class."""


class UndefinedMetricError(RelfilterError):
    """The requested metric is undefined for the given inputs."""


class BackendError(RelfilterError):
    """Embedding backend failure; carries the model identifier."""

    def __init__(self, backend_tag: str, message: str):
        super().__init__(f"backend '{backend_tag}': {message}")
        self.backend_tag = backend_tag
