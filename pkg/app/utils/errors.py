"""Exception hierarchy shared by the services, the CLI and the HTTP API."""


class ConcordanceError(ValueError):
    """Base class for every error raised by the toolkit."""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ZeroDivisorError(ConcordanceError, ZeroDivisionError):
    pass


class DomainError(ConcordanceError):
    """A precondition of an operation does not hold."""


class FrontError(ConcordanceError):
    """A front word is well formed but not a valid front for the request."""


class BudgetExceededError(ConcordanceError):
    """A bounded search ran past its configured budget."""


class UnsupportedError(ConcordanceError):
    pass


class ParseError(ConcordanceError):
    """Malformed text input; carries a 1-based position."""

    def __init__(self, message: str, position: int, line: int = 1, column: int = 0):
        self.position = position
        self.line = line
        self.column = column or position
        super().__init__(f"{message} (line {self.line}, column {self.column})")
