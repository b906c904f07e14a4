"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class EurohistError(Exception):
    """Base class for all package errors."""


class DomainError(EurohistError, ValueError):
    """An argument lies outside the domain of a numerical routine."""


class SingularDesignError(DomainError):
    """Least-squares design matrix is rank deficient."""

    def __init__(self, column: int, message: str | None = None):
        self.column = column
        super().__init__(message or f"design matrix is rank deficient at column {column}")


class DataError(EurohistError):
    """Input data failed validation.

    ``path`` and ``line`` locate the offending record when known.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
