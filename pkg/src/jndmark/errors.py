"""Exception hierarchy.

Validation problems derive from :class:`ValueError` and file problems from
:class:`OSError`, so callers that only care about the broad category can
catch the builtin. The command-line front end maps the two families onto
distinct exit codes.
"""


class WatermarkError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(WatermarkError, ValueError):
    """Bad argument or unsupported input geometry."""


class IOFailure(WatermarkError, OSError):
    """File could not be read or written."""


class UnreadableFile(IOFailure):
    pass


class UnwritableDestination(IOFailure):
    pass


class UnsupportedFormat(ValidationError):
    pass


class MaxvalNot255(UnsupportedFormat):
    pass


class DimensionsNotBlockAligned(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class GeometryMismatch(ValidationError):
    pass


class EmptyBitmap(ValidationError):
    pass


class NotPrime(ValidationError):
    pass


class QisTwo(NotPrime):
    pass


class InvalidDetectorParameters(ValidationError):
    pass


class InvalidRow(ValidationError):
    pass


class QualityOutOfRange(ValidationError):
    pass


class EvenWindow(ValidationError):
    pass


class InvalidAttack(ValidationError):
    pass


class EmptySweep(ValidationError):
    pass


class MissingSize(ValidationError):
    pass
