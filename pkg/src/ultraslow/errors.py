"""Exception hierarchy shared by all modules."""


class UltraslowError(Exception):
    """Base class for library errors."""


class DomainError(UltraslowError, ValueError):
    """Argument outside the mathematical domain of the function."""


class NonConvergence(UltraslowError, ArithmeticError):
    """Series or iteration exhausted its budget before meeting tolerance."""


class QuadratureFailure(UltraslowError, ArithmeticError):
    """Numerical integration did not reach the requested accuracy."""


class RouteUnavailable(UltraslowError):
    """The requested evaluation route does not apply to these inputs."""


class SingularSample(UltraslowError, ArithmeticError):
    """An inverse-Laplace sample landed on a non-removable singularity."""


class Inapplicable(UltraslowError):
    """Asymptotic regime where the Tauberian argument does not apply."""


class InstabilityDetected(UltraslowError, ArithmeticError):
    """Time stepping lost mass or produced non-finite values."""


class EvaluationError(UltraslowError):
    """A user-supplied function failed while being sampled."""
