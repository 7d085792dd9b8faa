"""Exception types shared across the package."""


class SBKError(Exception):
    """Base class for all errors raised by sbk."""


class ResourceCapError(SBKError):
    """A configured search or completion limit was exceeded.

    ``partial`` carries whatever partial result the engine had at the time.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TruncationError(SBKError):
    """An element does not fit in the truncated ring at the requested D."""


class PreconditionError(SBKError):
    """An operation was called outside its documented domain."""


class NoApplicableBasisElement(SBKError):
    """Membership reduction got stuck: no basis vector dominates ``vector``."""

    def __init__(self, message, vector=None):
        super().__init__(message)
        self.vector = vector


class ParseError(SBKError):
    """Malformed textual or JSON input."""
