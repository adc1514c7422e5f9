"""Exception hierarchy shared by all modules."""


class SpecsegError(Exception):
    """Base class for library errors."""


class DimensionError(SpecsegError, ValueError):
    """Empty inputs or mismatched shapes."""


class DegenerateInputError(SpecsegError, ValueError):
    """Quantity is undefined for the given input (zero loss, empty union, ...)."""


class FormatError(SpecsegError, ValueError):
    """Malformed file contents or values outside the declared range."""


class EnvelopeError(SpecsegError, ArithmeticError):
    """A numerical routine was asked to work outside its accuracy envelope."""
