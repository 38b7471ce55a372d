"""Exception hierarchy shared by every module."""


class SeriesBoundError(Exception):
    """Base class for all errors raised by seriesbound."""


class LexError(SeriesBoundError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ParseError(SeriesBoundError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class EvalError(SeriesBoundError, ArithmeticError):
    """Function could not be evaluated to a finite real."""


class DomainError(SeriesBoundError, ValueError):
    """Arguments outside an operation's precondition."""


class HypothesisViolation(SeriesBoundError):
    """Screening found f is not positive and decreasing on the sampled range."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnknownEntry(SeriesBoundError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown catalog entry"


class ParamError(SeriesBoundError, ValueError):
    pass


class DivergentSeries(SeriesBoundError):
    """Closed-form tail or sum requested for a divergent family."""
