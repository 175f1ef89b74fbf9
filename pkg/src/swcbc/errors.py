"""Exception types shared by the solver modules."""


class SwcbcError(Exception):
    """Base class for all library errors."""


class InvalidMesh(SwcbcError):
    """Mesh construction arguments violate a precondition."""


class UnsupportedRule(SwcbcError):
    """Requested quadrature rule is not provided."""


class SingularMatrix(SwcbcError):
    """Tridiagonal elimination hit a vanishing pivot."""


class MissingBoundaryValue(SwcbcError):
    """A masked node was requested without a prescribed value."""


class OutOfDomain(SwcbcError):
    """Evaluation point lies outside the mesh interval."""


class DryState(SwcbcError):
    """Total water depth reached zero or below (1+eta <= 0, or h <= 0)."""


class NonFiniteState(SwcbcError):
    """A Runge-Kutta stage produced a non-finite coefficient."""


class UnknownCase(SwcbcError):
    """Manufactured-solution case name not in the catalog."""


class ConfigurationError(SwcbcError):
    """Inconsistent run configuration (e.g. step count not matching T)."""


class ParseError(SwcbcError):
    """Config document could not be parsed; carries the line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ValidationError(SwcbcError):
    """A config key failed validation; carries the offending key."""

    def __init__(self, key, message=""):
        super().__init__(f"{key}: {message}" if message else str(key))
        self.key = key
