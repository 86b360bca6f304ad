"""Exception and warning types raised across the package."""


class AlmgrenError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveWeight(AlmgrenError):
    pass


class DuplicateEdge(AlmgrenError):
    pass


class EmptyGraph(AlmgrenError):
    pass


class Disconnected(AlmgrenError):
    pass


class InvalidVertex(AlmgrenError):
    pass


class ParameterOutOfRange(AlmgrenError):
    pass


class SizeLimit(AlmgrenError):
    pass


class ParseError(AlmgrenError):
    """Malformed input text; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.message = message
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class IoError(AlmgrenError, OSError):
    pass


class MissingValue(AlmgrenError):
    pass


class NoConvergence(AlmgrenError):
    def __init__(self, message, iterations=None, residual=None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class InconsistentBoundary(AlmgrenError):
    pass


class NotDiscreteHarmonic(AlmgrenError):
    def __init__(self, message, witness=None, value=None):
        self.witness = witness
        self.value = value
        super().__init__(message)


class RangeOutOfBounds(AlmgrenError):
    pass


class BadExponent(AlmgrenError):
    pass


class NotHarmonic(AlmgrenError):
    pass


class SelfLoopDropped(UserWarning):
    pass


class EmptyHorizon(UserWarning):
    """No layer index satisfies the hypotheses needed to report N(k)."""
