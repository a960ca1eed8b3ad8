"""Exception hierarchy shared across the package.

Every error raised by dfdiag derives from :class:`DfdError`, so callers can
catch one type at pipeline boundaries while tests assert the precise class.
"""


class DfdError(Exception):
    """Base class for all dfdiag errors."""


class SpecError(DfdError):
    """Invalid or degenerate synthetic-signature specification."""


class MissingData(DfdError):
    """A manifest references a tensor file that does not exist or is truncated."""


class FormatError(DfdError):
    """Bad magic, wrong version, or otherwise malformed container/manifest."""


class InvalidFraction(DfdError):
    """Sampling or split fraction outside its allowed range."""


class ClassStarved(DfdError):
    """A subsampling fraction leaves some class without a single sample."""


class InvalidWindow(DfdError):
    """Window length too short for the requested window function."""


class LengthError(DfdError):
    """Transform length is not a power of two (or otherwise unusable)."""


class SignalTooShort(DfdError):
    """Signal shorter than the framing configuration requires."""


class EmptyInput(DfdError):
    """An operation received an empty vector or dataset where data is required."""


class NonFinite(DfdError):
    """NaN or infinity encountered where finite values are required."""


class ShapeError(DfdError):
    """Mismatched dimensions between related arrays."""


class EmptyCombination(DfdError):
    """A feature combination must name at least one feature."""


class UnknownFeature(DfdError):
    """Feature name not present in the extracted pool."""


class DegenerateLabels(DfdError):
    """Training data contains fewer than two classes."""


class InvalidK(DfdError):
    """Model-pool size k outside [1, number of candidates]."""


class EmptyPool(DfdError):
    """Operation requires a non-empty model pool."""


class SchemaError(DfdError):
    """Datasets disagree on class set, channel count, length, or sample rate."""


class ArchError(DfdError):
    """Network architecture does not propagate to positive tensor sizes."""


class EmptyDataset(DfdError):
    """Training requires at least one sample."""


class ConfigError(DfdError):
    """Malformed experiment configuration file or unknown option."""
