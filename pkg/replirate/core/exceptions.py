"""Error hierarchy shared by the numerical core and the command line."""


class ReplirateError(Exception):
    """Base class for every error raised by the package."""

    code: str = "ERROR"
    exit_code: int = 1

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message


class DomainError(ReplirateError, ValueError):
    """A parameter lies outside the domain of the operation."""

    code = "DOMAIN"
    exit_code = 2


class ImproperPosteriorError(DomainError):
    """The requested prior/data combination yields an improper posterior."""

    code = "IMPROPER_POSTERIOR"


class InsufficientDrawsError(DomainError):
    """Too few Monte Carlo draws for a stable interval summary."""

    code = "INSUFFICIENT_DRAWS"


class DataFileError(ReplirateError):
    """An input file could not be read or an output file could not be written."""

    code = "IO"
    exit_code = 3


class NonConvergenceError(ReplirateError):
    """A numerical procedure failed its own convergence check."""

    code = "NON_CONVERGENCE"
    exit_code = 4
