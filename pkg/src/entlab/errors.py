"""Exception types shared by every module."""


class EntlabError(Exception):
    """Base class for all library errors."""


class InvalidInputError(EntlabError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedInputError(InvalidInputError):
    """The input is valid in general but not handled by this routine."""


class CapabilityError(EntlabError):
    """The requested size is beyond what dense simulation can hold."""


class ConvergenceError(EntlabError):
    """An iterative solver stopped before meeting its tolerance.

    The best iterate found so far is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
