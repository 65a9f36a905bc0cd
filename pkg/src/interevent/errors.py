"""Exception hierarchy shared by every stage of the pipeline."""


class IntereventError(Exception):
    """Base class; CLI maps subclasses to exit codes."""

    #: short token used in ``undef(<reason>)`` report cells
    reason = "error"


class ParseError(IntereventError):
    reason = "parse-error"

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.detail = reason


class EmptyStream(IntereventError):
    reason = "empty-stream"


class InsufficientEvents(IntereventError):
    reason = "insufficient-events"


class DegenerateTail(IntereventError):
    reason = "degenerate-tail"


class ZeroVariance(IntereventError):
    reason = "zero-variance"


class DomainError(IntereventError, ValueError):
    reason = "domain-error"


class InvalidSpec(IntereventError, ValueError):
    reason = "invalid-spec"


class UnknownUser(IntereventError, KeyError):
    reason = "unknown-user"

    def __str__(self):
        return Exception.__str__(self)
