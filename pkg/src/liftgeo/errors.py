"""Exception hierarchy shared by every liftgeo module."""


class LiftGeoError(Exception):
    """Base class for all errors raised by liftgeo."""


class ExprSyntaxError(LiftGeoError, ValueError):
    """Malformed expression source. ``position`` is a 0-based character offset."""

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"{message} at position {position}")


class UnknownIdentifier(ExprSyntaxError):
    pass


class DimensionExceeded(ExprSyntaxError):
    pass


class DomainError(LiftGeoError, ArithmeticError):
    """An expression was evaluated outside its domain (log of 0, 1/0, ...)."""


class SingularMetric(LiftGeoError, ArithmeticError):
    pass


class NonPositiveWeight(LiftGeoError, ValueError):
    """A weight function (f, h, f1) is not strictly positive at a sample point."""


class ZeroDirection(LiftGeoError, ValueError):
    pass


class NonConvergence(LiftGeoError, RuntimeError):
    pass


class DefinitionParseError(LiftGeoError, ValueError):
    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        self.message = message
        super().__init__(f"{path}:{line}: {message}")


class ValidationError(LiftGeoError, ValueError):
    pass


class UnknownCheck(LiftGeoError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown check"
