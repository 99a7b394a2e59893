"""Exception and warning types shared across the package."""


class PrabhakarError(Exception):
    """Base class for all package errors."""


class InvalidParams(PrabhakarError, ValueError):
    """Parameters outside the admissible region."""


class NonConvergence(PrabhakarError, ArithmeticError):
    """A series could not be summed to the requested tolerance."""


class LeavesAlgebra(PrabhakarError):
    """An operation would produce a term outside the locally integrable algebra."""


class QuadratureFailure(PrabhakarError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance within budget."""


class InterpolationFailure(PrabhakarError, ArithmeticError):
    """A piecewise Chebyshev interpolant did not resolve the sampled function."""


class InsufficientSmoothness(PrabhakarError):
    """A sampled function lacks the classical derivatives an operator needs."""


class ModeDivergence(PrabhakarError, ArithmeticError):
    """The per-mode lambda series of the heat solver could not be summed.

    ``cutoff`` holds the largest angular frequency that was summed successfully.
    """

    def __init__(self, msg, cutoff=None, omega=None):
        super().__init__(msg)
        self.cutoff = cutoff
        self.omega = omega


class TruncationWarning(UserWarning):
    """A truncated outer series has a non-negligible estimated tail.

    ``tail_bound`` holds the estimate.
    """

    def __init__(self, msg, tail_bound=float("nan")):
        super().__init__(msg)
        self.tail_bound = tail_bound


class ConstraintWarning(UserWarning):
    """A soft parameter constraint is violated."""
