"""Exception hierarchy.

``InputError`` subclasses signal bad user-supplied data (CLI exit code 2);
``MissingPrerequisite`` maps to exit code 3; everything else is a
modelling or numerical failure that callers usually record and skip.
"""


class EventCurveError(Exception):
    """Base class for all package errors."""


class InputError(EventCurveError):
    """Malformed or inconsistent input files."""


class ParseError(InputError):
    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DuplicateDate(ParseError):
    pass


class BadFilename(InputError):
    pass


class EmptyDocument(InputError):
    pass


class UnknownField(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ConfigError(InputError):
    pass


class MissingPrerequisite(EventCurveError):
    pass


class NoTradingDate(EventCurveError):
    pass


class WindowUnavailable(EventCurveError):
    def __init__(self, message, kind=None):
        self.kind = kind
        super().__init__(message)


class MissingValue(EventCurveError):
    pass


class EmptySample(EventCurveError):
    pass


class InsufficientData(EventCurveError):
    pass


class ZeroVariance(EventCurveError):
    pass


class SingularDesign(EventCurveError):
    pass


class LeverageOne(EventCurveError):
    pass


class InsufficientSample(EventCurveError):
    pass


class NoConvergence(EventCurveError):
    def __init__(self, message, sweeps=None, max_violation=None):
        self.sweeps = sweeps
        self.max_violation = max_violation
        super().__init__(message)
