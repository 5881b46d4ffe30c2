"""Exception hierarchy shared by every qgeom module."""


class QGeomError(Exception):
    """Base class for all qgeom errors."""


class ConfigError(QGeomError, ValueError):
    """Invalid user input: bad definitions, wrong arity, bad flags."""


class ExpressionSyntaxError(ConfigError):
    """Malformed expression text.

    ``offset`` is a byte offset into the UTF-8 encoded source and
    ``expected`` the set of tokens that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class UnknownFunctionError(ExpressionSyntaxError):
    pass


class FamilyDefinitionError(ConfigError):
    """A family or chart file failed validation."""


class UnboundParameterError(ConfigError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DomainError(ConfigError):
    """A point or a differentiation stencil leaves the declared bounds."""


class NumericalError(QGeomError, ArithmeticError):
    """Singular metric, zero-norm state or non-finite intermediate."""
