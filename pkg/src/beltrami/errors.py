"""Exception hierarchy shared by every module."""


class BeltramiError(Exception):
    """Base class for all errors raised by this package."""


# -- jet substrate ----------------------------------------------------------

class JetError(BeltramiError):
    """Jet failure; ``span`` locates the offending subexpression when known."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span

    def __str__(self):
        msg = super().__str__()
        if self.span is not None:
            return f"{msg} (in subexpression at columns {self.span[0]}-{self.span[1]})"
        return msg


class DivisionByZeroJet(JetError, ZeroDivisionError):
    pass


class DomainError(JetError, ValueError):
    pass


class OrderExceeded(JetError, IndexError):
    pass


# -- expressions -------------------------------------------------------------

class ExprError(BeltramiError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.reason = message


class UnknownIdentifier(ExprError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class ArityError(ExprError):
    def __init__(self, name, expected, got, offset):
        super().__init__(f"{name}() takes {expected} argument(s), got {got} (offset {offset})")
        self.name = name
        self.offset = offset


# -- geometry ----------------------------------------------------------------

class GeometryError(BeltramiError):
    pass


class IrregularPoint(GeometryError):
    pass


class ParabolicPoint(GeometryError):
    pass


class SingularForm(GeometryError):
    pass


class IrregularOffset(GeometryError):
    pass


class ExcludedSurface(GeometryError):
    """Surface consists only of parabolic points (plane, circular cylinder)."""


# -- profiles ------------------------------------------------------------------

class ProfileError(GeometryError):
    pass


class DegenerateSpeed(ProfileError):
    pass


class NonMonotoneArcLength(ProfileError):
    pass


class ParabolicProfilePoint(ProfileError):
    pass


class NotArcLength(ProfileError):
    pass


class ClassificationFailure(ProfileError):
    """Constant R detected but no branch of the classification confirmed it."""
