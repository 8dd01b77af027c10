class RumlemError(Exception):
    """Base class for every error the toolkit raises on purpose."""

    exit_code: int = 1


class MalformedEntry(RumlemError, ValueError):
    exit_code = 2


class UnsupportedPattern(RumlemError, ValueError):
    """The entry's pattern signature has no parsing rule; the entry is skipped, never guessed."""

    exit_code = 2

    def __init__(self, message: str, signature: str = "") -> None:
        super().__init__(message)
        self.signature = signature


class MultiWordEntry(UnsupportedPattern):
    """Entry spans several words (`w+`). Dropped from the lexicon, counted in the build report."""


class VarietyMismatch(RumlemError, ValueError):
    exit_code = 2


class UnknownVariety(RumlemError, ValueError):
    exit_code = 2


class LexiconNotFound(RumlemError):
    exit_code = 2


class ConfigurationError(RumlemError, ValueError):
    exit_code = 2


class IncompatibleVersion(RumlemError):
    exit_code = 2


class CorruptFile(RumlemError):
    exit_code = 2


class EmptyInput(RumlemError, ValueError):
    """No tokens left to score; callers must not divide by zero."""

    exit_code = 3


class SourceUnavailable(RumlemError):
    """A text source (path, URL or stdin) could not be read."""

    exit_code = 2
