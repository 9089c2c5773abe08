"""Exception types shared across the package."""


class SpanqaError(Exception):
    """Base class for all package errors."""


class DuplicateDocId(SpanqaError):
    """Two corpus documents share the same doc_id."""


class EmptyCorpus(SpanqaError):
    """Ingest was handed a corpus with no documents."""


class CorpusInvalid(SpanqaError):
    """A corpus file line could not be parsed."""


class IoFailure(SpanqaError):
    """Reading or writing an artifact file failed."""


class FormatVersionMismatch(SpanqaError):
    """A persisted index file has a bad magic, version, or is truncated."""


class ProviderUnavailable(SpanqaError):
    """A remote mask-fill provider could not be reached or misbehaved."""


class UntrainedProvider(SpanqaError):
    """The co-occurrence provider was queried before training."""


class InvalidStride(SpanqaError):
    """Chunking stride is out of its valid range (1..max_tokens)."""


class BackendUnavailable(SpanqaError):
    """A remote reader backend could not be reached or misbehaved."""


class ConfigInvalid(SpanqaError):
    """A configuration file failed validation.

    The message names the offending field, e.g. ``retriever.b: must be
    within [0, 1]``.
    """

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class DatasetInvalid(SpanqaError):
    """An evaluation dataset file could not be parsed."""
