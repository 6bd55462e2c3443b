"""Exception types.  Each carries the CLI exit status it maps to."""


class ItdistError(Exception):
    exit_code = 1


class ParseError(ItdistError):
    exit_code = 2

    def __init__(self, msg, line=None, col=None, source=None):
        self.msg = msg
        self.line = line
        self.col = col
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
            if col is not None:
                where += f"{col}:"
        super().__init__(f"{where} {msg}".strip())


class InvariantViolation(ItdistError):
    """An internal check failed; the message names the entity and invariant."""

    exit_code = 3


class NonAdmissible(InvariantViolation):
    pass


class ResourceError(ItdistError):
    """A configured budget (terms, trials, window) ran out."""

    exit_code = 4


class Inconclusive(ItdistError):
    exit_code = 5
