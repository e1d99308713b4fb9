"""Exception types shared across the package."""


class EcocError(Exception):
    """Base class for errors raised by this package."""


class DomainError(EcocError):
    """A quantity was requested outside the region where its formula applies."""


class ModelError(EcocError):
    """Parameters do not describe a valid joint error distribution."""


class ParseError(EcocError):
    """A data file could not be parsed.

    Carries the offending line number (1-based, header included) when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
