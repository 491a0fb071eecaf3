# Copyright (c) 2026 The relevatr authors
"""Exceptions raised by relevatr, grouped by the CLI exit code they map to."""


class UsageError(ValueError):
    """A command was given missing or contradictory options."""


class DatasetError(ValueError):
    """A dataset file or record cannot be turned into evaluation instances."""


class ArtifactError(DatasetError):
    """A file written by a previous command, such as a verdict file or a sample manifest, is malformed."""


class SamplingError(ValueError):
    """A sampling plan cannot be satisfied by the population."""


class PromptError(ValueError):
    """A prompt cannot be built for the requested configuration."""


class MissingAnswerError(PromptError):
    """The prompt variant needs a gold answer but the instance has none."""


class UnknownVariantError(PromptError):
    """No template exists for the requested (strategy, variant) pair."""


class UnparseableVerdictError(ValueError):
    """A judge response contains neither or both verdict tokens."""


class KeyMismatchError(ValueError):
    """Two verdict sets, or verdicts and gold labels, do not cover the same keys."""


class TransportError(RuntimeError):
    """A completion could not be obtained."""


class AuthenticationError(TransportError):
    """The provider rejected the credentials. Never retried."""


class RateLimitError(TransportError):
    """The provider asked the client to slow down. Retried with backoff."""


class ProviderUnavailableError(TransportError):
    """A timeout, connection failure or server error. Retried with backoff."""


class RequestRejectedError(TransportError):
    """The provider rejected the request itself. Never retried."""


class RetriesExhaustedError(TransportError):
    """Transient failures persisted past the retry cap."""


class CacheMissError(TransportError):
    """A strict replay found no recorded response for a request."""


class ReplayStoreError(TransportError):
    """The replay store cannot be read or written."""


class DigestConflictError(ReplayStoreError):
    """A digest is already recorded with a different response text."""


INPUT_ERRORS = (
    UsageError,
    DatasetError,
    ArtifactError,
    SamplingError,
    PromptError,
    KeyMismatchError,
    FileNotFoundError,
)
