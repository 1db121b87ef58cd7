"""Exception types shared by every module.

The CLI maps each class to a fixed exit code (see ``cli.EXIT_CODES``).
"""


class MintermError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(MintermError, ValueError):
    pass


class ResourceLimitError(MintermError, RuntimeError):
    """A configured size cap (group closure, brute-force limit, ...) was hit."""


class ConstructionFailure(MintermError, RuntimeError):
    """A randomized construction exhausted its attempts.

    ``stats`` carries per-criterion failure counts and similar diagnostics.
    """

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})


class LogicError(MintermError, AssertionError):
    """An internal consistency check failed; indicates a bug, never user error."""
