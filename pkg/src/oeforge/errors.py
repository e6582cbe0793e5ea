"""Exception hierarchy shared across the toolkit."""


class ForgeError(Exception):
    """Base class for all domain errors (CLI exit code 1)."""


class ValidationError(ForgeError):
    """A record or config violates an invariant."""


class DuplicateIdError(ForgeError):
    """An id already exists in the store."""


class UnknownRecordError(ForgeError):
    """A referenced id does not exist."""


class StoreError(ForgeError):
    """Store-level failure (corrupt file, lock contention, bad import)."""


class InferenceError(ForgeError):
    """Base class for backend/client failures."""


class AuthError(InferenceError):
    """Credential missing or rejected; raised before any network call."""


class ContextOverflowError(InferenceError):
    """Prompt exceeds the configured context budget; no request is sent."""


class TimeoutAfterRetriesError(InferenceError):
    """Transport kept failing after exhausting max_retries."""


class MalformedResponseError(InferenceError):
    """Backend reply did not match the wire contract."""


class MissingOperandError(ForgeError):
    """A prompt template was invoked without a required field."""


class MalformedTagsError(ForgeError):
    """Tagged markup is unbalanced, nested, or uses unknown tags."""


class InsufficientDataError(ForgeError):
    """The store cannot satisfy a requested task mixture or sample size."""
