"""Exception hierarchy shared across the package."""


class DbcsError(Exception):
    """Base class for all errors raised by dbcs."""


class DataQualityError(DbcsError, ValueError):
    """A record or accumulator input is malformed or non-finite."""


class PositivityError(DataQualityError):
    """An assignment probability lies outside the open interval (0, 1)."""


class ContractError(DbcsError, ValueError):
    """An engine or boundary precondition was violated by the data."""


class NumericalError(DbcsError, ArithmeticError):
    """A numerical routine failed to converge.

    ``diagnostics`` carries whatever state the routine had when it gave up.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"
