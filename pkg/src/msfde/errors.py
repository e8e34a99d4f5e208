"""Exception hierarchy shared by every module."""


class MsfdeError(Exception):
    """Base class for numerical and domain errors raised by the library."""


class GridAlignmentError(MsfdeError, ValueError):
    """A time, delay or atom location is not an integer multiple of the step."""


class DomainError(MsfdeError, IndexError):
    """A table was evaluated outside its declared domain."""


class StepSizeError(MsfdeError):
    """An implicit step became singular; a smaller step is required."""


class PreconditionError(MsfdeError, ValueError):
    pass


class ConsistencyError(MsfdeError):
    """Two independent routes to the same quantity disagree beyond tolerance."""


class InsufficientHorizonError(MsfdeError, ValueError):
    pass


class AliasingError(MsfdeError, ValueError):
    """The forcing oscillates faster than the grid can resolve."""
