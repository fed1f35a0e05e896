"""Exception types raised by the library."""


class SkaError(Exception):
    """Base class for all errors raised by this package."""


class UnknownUserError(SkaError):
    """A subset refers to a label outside the ground set."""


class GroundSetMismatchError(SkaError):
    """Two objects built over different ground sets were combined."""


class EnumerationLimitError(SkaError):
    """The ground set exceeds the configured brute-force cap."""


class MissingEdgeError(SkaError):
    """The source does not carry the requested edge, or not enough of it."""


class ConsistencyError(SkaError):
    """An internal invariant failed; indicates a bug, not bad input."""
