"""Exception types raised across the pipeline."""


class PrivLabelError(Exception):
    """Base class for all package errors."""


class SchemaError(PrivLabelError, ValueError):
    pass


class ExclusivityViolation(SchemaError):
    """DataNotCollected appeared alongside another privacy type."""


class NetworkError(PrivLabelError):
    pass


class RetriesExhausted(PrivLabelError):
    def __init__(self, url, attempts, status):
        super().__init__(f"{url}: gave up after {attempts} attempts (last status {status})")
        self.url = url
        self.attempts = attempts
        self.status = status


class FetchError(PrivLabelError):
    """Non-retryable HTTP status."""

    def __init__(self, url, status):
        super().__init__(f"{url}: HTTP {status}")
        self.url = url
        self.status = status


class EmptyDocument(PrivLabelError):
    pass


class DimensionMismatch(PrivLabelError, ValueError):
    pass


class EmptyModel(PrivLabelError):
    pass


class InsufficientData(PrivLabelError):
    pass


class MissingClassifier(PrivLabelError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class RuleConfigError(PrivLabelError):
    pass


class AppIdMismatch(PrivLabelError, ValueError):
    pass


class UnknownFacet(PrivLabelError, ValueError):
    pass


class IOFailure(PrivLabelError, OSError):
    pass


class EmptyInput(PrivLabelError, ValueError):
    pass


class ConfigError(PrivLabelError):
    pass


class MissingDependency(PrivLabelError):
    def __init__(self, artifact):
        super().__init__(f"missing upstream artifact: {artifact}")
        self.artifact = artifact


class DegenerateLabel(UserWarning):
    """A label had no positive or no negative training example.

    Emitted as a warning; the label's classifier becomes a constant predictor
    and is listed in ``ClassifierModel.degenerate``.
    """
