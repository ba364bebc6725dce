"""Exception hierarchy shared by all modules."""


class ComplexError(Exception):
    """Base class for errors raised by this package."""


class RangeError(ComplexError, ValueError):
    """An integer parameter lies outside its admissible range."""


class InvalidSimplexError(ComplexError, ValueError):
    """A simplex is not a simplex of the complex it is used with."""


class InvalidSubcomplexError(ComplexError, ValueError):
    """A collection of simplices is not a subcomplex of the given complex."""


class ComplexValidationError(ComplexError, ValueError):
    """Input data does not describe a valid simplicial complex."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = offending


class ConstructionError(ComplexError):
    """A builder cannot satisfy the requested constraints."""


class SystolicityViolation(ComplexError):
    """A projection that must be a single simplex in a systolic complex is not.

    ``witness`` holds the data needed to reproduce the failure.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ChainViolation(SystolicityViolation):
    """Projections of the vertices of one simplex are not nested."""


class TruncationError(ComplexError):
    """A request reaches past the region where the finite complex is trustworthy."""
