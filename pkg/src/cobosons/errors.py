"""Exception hierarchy shared by all modules."""


class CobosonError(Exception):
    """Base class for errors raised by this package."""


class InvalidParameterError(CobosonError, ValueError):
    """A parameter lies outside its admissible range."""


class DomainError(InvalidParameterError):
    """A formula was evaluated outside the range where it is defined."""


class ContractViolation(CobosonError):
    """An input does not satisfy a documented precondition (e.g. normalization)."""


class NumericError(CobosonError, ArithmeticError):
    """A numerical result failed an internal consistency check."""


class PauliBlockedError(CobosonError):
    """A fermionic normalization constant vanished so a ratio is undefined."""


class SizeGuardError(CobosonError):
    """A brute-force enumeration would exceed its configured size guard."""
