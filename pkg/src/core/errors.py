"""Exception hierarchy shared by every sub-package."""


class AlgRealismError(Exception):
    """Base class for all errors raised by the toolkit."""


class InputValidationError(AlgRealismError, ValueError):
    """A precondition on the inputs does not hold."""


class InfeasibleDistortionError(InputValidationError):
    """The requested distortion is below what any marginal-preserving kernel achieves."""

    def __init__(self, requested: float, min_distortion: float):
        self.requested = requested
        self.min_distortion = min_distortion
        super().__init__(
            f"Distortion {requested:.6g} is infeasible: the minimal distortion over "
            f"marginal-preserving kernels is {min_distortion:.6g}"
        )


class UnsupportedLengthError(InputValidationError):
    """A critic was asked to score a block length outside its precomputed range."""


class ResourceLimitError(AlgRealismError, RuntimeError):
    """An enumeration, memory or discretization budget would be exceeded."""


class NumericalError(AlgRealismError, ArithmeticError):
    """A computation degenerated (all-zero weights, non-convergence)."""


class BoundViolationError(AlgRealismError):
    """A verified inequality failed at the requested confidence."""
