"""Exception types shared across the package."""


class FairlensError(Exception):
    """Base class for all fairlens errors."""


class MalformedDatasetError(FairlensError):
    """A record or input file violates the dataset contract."""


class ConfigurationError(FairlensError):
    """An operation was invoked with an unknown or inconsistent configuration."""


class ValidationError(FairlensError):
    """An input value lies outside its documented domain."""


class DegenerateInputError(FairlensError):
    """The requested statistic is undefined on the observed assignment."""


class CapacityError(FairlensError):
    """An input exceeds a configured size cap."""


class ComparabilityError(FairlensError):
    """Two reports cannot be compared against each other."""


class CanonicalizationError(FairlensError):
    """A value cannot be rendered in canonical serialized form."""


class KeyMaterialError(FairlensError):
    """Key bytes are malformed or have the wrong length."""


class AuthenticationFailure(FairlensError):
    """AEAD authentication failed: wrong key or tampered ciphertext."""


class BindingError(FairlensError):
    """An event or certificate does not bind to the expected digest."""


class NotFoundError(FairlensError):
    """A referenced service, report, or entry does not exist."""


class ConflictError(FairlensError):
    """A write collides with existing state that it may not replace."""
