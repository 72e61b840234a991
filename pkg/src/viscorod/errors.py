"""Exception types shared across the solver."""


class ViscorodError(Exception):
    """Base class for all solver errors."""


class DomainError(ViscorodError, ValueError):
    """Evaluation requested outside the cut plane (s = 0 or unflagged negative reals)."""


class PoleProximityError(ViscorodError, ArithmeticError):
    """A transfer function was evaluated too close to a pole of the hyperbolic ratio."""


class ConvergenceError(ViscorodError, RuntimeError):
    """An iterative solve (root finding, inversion) failed to converge."""


class QuadratureError(ViscorodError, RuntimeError):
    """Adaptive quadrature could not meet its tolerance or hit invalid values."""
