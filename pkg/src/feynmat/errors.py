"""Exception hierarchy shared by all modules."""


class FeynmatError(Exception):
    """Base class for errors raised by feynmat."""


class DimensionError(FeynmatError, ValueError):
    """Matrix shapes do not fit the operation."""


class DomainError(FeynmatError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class StateError(FeynmatError, ValueError):
    """An object is in the wrong form for the operation (e.g. not standardized)."""


class IntegrityError(FeynmatError, RuntimeError):
    """An internal guarantee was violated; the inputs broke a precondition."""


class ConsistencyError(FeynmatError, ValueError):
    """Momentum data cannot be made consistent."""


class SchemaError(FeynmatError, ValueError):
    """An input document does not match its schema."""


class ElementLookupError(FeynmatError, KeyError):
    """A ground set element was not found."""
