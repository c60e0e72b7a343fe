"""Exception types raised by the engine."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class TruncationError(RuntimeError):
    """A sampled function does not decay at the edge of its grid.

    ``boundary`` carries the relative magnitude found at the edge, ``time``
    the evolution time at which it happened (if any).
    """

    def __init__(self, message, boundary=None, time=None):
        super().__init__(message)
        self.boundary = boundary
        self.time = time
