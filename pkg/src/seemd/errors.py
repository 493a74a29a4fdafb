"""Exception hierarchy shared by every module.

All errors derive from :class:`SeemdError`; the ones that describe bad
caller input also derive from :class:`ValueError` so generic handlers
keep working.
"""


class SeemdError(Exception):
    """Base class for all package errors."""


class InvalidInput(SeemdError, ValueError):
    """Input values violate a documented precondition."""


class EmptyInput(InvalidInput):
    pass


class TooShort(InvalidInput):
    pass


class LengthTooShort(TooShort):
    pass


class ZeroVariance(InvalidInput):
    pass


class InvalidHurst(InvalidInput):
    pass


class InvalidStd(InvalidInput):
    pass


class InsufficientExtrema(SeemdError):
    """Too few extrema to build an envelope; the component is a residue."""


class EmptyDecomposition(InvalidInput):
    pass


class InvalidK(InvalidInput):
    pass


class NoConvergence(SeemdError, RuntimeWarning):
    """Iterative solver hit its iteration cap. Emitted as a warning."""


class WindowTooLong(InvalidInput):
    pass


class HarmonicOutOfRange(InvalidInput):
    pass


class BadBandwidth(InvalidInput):
    pass


class InvalidGeometry(InvalidInput):
    pass


class ConfigInvalid(InvalidInput):
    pass


class ConfigParse(SeemdError):
    pass


class UnsupportedFormat(SeemdError):
    pass


class MissingFaultFreq(InvalidInput):
    pass


class IoError(SeemdError, OSError):
    """A file could not be read or written."""
