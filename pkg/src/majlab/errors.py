"""Exception hierarchy shared by every module."""


class MajlabError(Exception):
    """Base class for all library errors."""


class DataError(MajlabError, ValueError):
    """Malformed input data. ``field`` names the offending location."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class PreconditionError(MajlabError, ValueError):
    """An operation was called outside its documented domain."""


class IncompatibleSpaces(MajlabError, ValueError):
    """Two step functions live on spaces that cannot be compared."""


class NotMajorized(MajlabError, ValueError):
    """A construction required x to be majorized by y, and it is not."""


class SlotBoundExceeded(MajlabError, ValueError):
    """Refining to equal-weight slots would exceed the configured bound."""


class NoPerfectMatching(MajlabError, RuntimeError):
    """The positive support of a supposedly doubly stochastic matrix has no perfect matching."""


class NoApplicablePattern(MajlabError, ValueError):
    """A non-extreme point matched none of the implemented perturbation patterns."""
