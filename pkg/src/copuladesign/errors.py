"""Exception hierarchy shared by every module of the package."""


class CopulaDesignError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(CopulaDesignError, ValueError):
    """A copula parameter (or other argument) lies outside its admissible domain."""


class BoundaryError(CopulaDesignError, ValueError):
    """Evaluation requested on a boundary where the quantity may diverge."""


class AttainabilityError(CopulaDesignError, ValueError):
    """A Kendall's tau value cannot be reached by the requested family."""


class QuadratureError(CopulaDesignError, ArithmeticError):
    """A quadrature integrand produced a non-finite sample."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DegenerateInformationError(CopulaDesignError, ArithmeticError):
    """A cell probability collapsed so the information matrix is undefined."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class InternalConsistencyError(CopulaDesignError, AssertionError):
    """A mathematical invariant was violated; signals a bug, not bad input."""


class SingularDesignError(CopulaDesignError, ArithmeticError):
    """The information matrix of a design is singular."""


class InitializationError(CopulaDesignError, RuntimeError):
    """No nonsingular starting design could be constructed."""


class DesignValidationError(CopulaDesignError, ValueError):
    """A design measure violates its invariants."""


class ConfigError(CopulaDesignError, ValueError):
    """A problem configuration or design file is malformed."""
