"""Exception hierarchy shared by all modules."""


class AddcodesError(Exception):
    """Base class for all package errors."""


class ConfigurationError(AddcodesError):
    """Unsupported parameters or inconsistent configuration data."""


class UsageError(AddcodesError):
    """Operands or arguments that do not fit together."""


class DomainError(AddcodesError, ArithmeticError):
    """Mathematically undefined operation (e.g. inverse of zero)."""


class InputError(AddcodesError, ValueError):
    """Malformed or invalid input data."""


class ResourceError(AddcodesError):
    """A configured size cap would be exceeded."""


class ContractError(AddcodesError):
    """A precondition of an operation is violated."""


class ParseError(InputError):
    """A text format could not be parsed; message includes the location."""
