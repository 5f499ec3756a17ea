"""Exception hierarchy.

Everything raised on purpose derives from :class:`StacError`. Domain errors
(bad masks, missing classes, CFL) are ``ValueError`` subclasses; file format
errors derive from :class:`VolumeIOError`.
"""


class StacError(Exception):
    """Base class for all library errors."""


class DomainError(StacError, ValueError):
    """Input violates a mathematical precondition."""


class ShapeMismatch(DomainError):
    pass


class EmptyMask(DomainError):
    pass


class FullMask(DomainError):
    pass


class TooLarge(DomainError):
    pass


class TooThin(DomainError):
    pass


class CflViolation(DomainError):
    pass


class MinorityAbsent(DomainError):
    pass


class NoForeground(DomainError):
    pass


class EmptySurface(DomainError):
    pass


class SpecInvalid(DomainError):
    pass


class VolumeIOError(StacError, OSError):
    """Raised for unreadable or malformed volume files."""


class ParseError(VolumeIOError):
    pass


class SizeMismatch(VolumeIOError):
    pass


class Unsupported(VolumeIOError):
    pass
