"""Exception types shared across the package."""


class StarIsoError(Exception):
    """Base class for all package errors."""


class InternalError(StarIsoError):
    """A 'cannot happen' condition, e.g. a Las Vegas loop ran past its retry bound."""


class BudgetExceeded(StarIsoError):
    """A search or enumeration hit its configured budget."""


class FieldTooSmall(StarIsoError):
    """The field is too small for the implemented large-field algorithm."""


class Degenerate(StarIsoError):
    """The input tuple has a nonzero common kernel where none is allowed."""


class NonDivisor(StarIsoError):
    """Requested subfield degree does not divide the extension degree."""


class NotInvertible(StarIsoError):
    """A matrix or algebra element that must be a unit is not."""


class ShapeMismatch(StarIsoError):
    """Operands have incompatible shapes."""


class NotPGroup(StarIsoError):
    pass


class NotClassTwo(StarIsoError):
    pass


class NotExponentP(StarIsoError):
    pass


class ParseError(StarIsoError):
    pass
