"""Typed errors shared across the package."""


class SurfrepError(Exception):
    """Base class for all package-specific errors."""


class NearSingularError(SurfrepError):
    """A linear solve inside a transform hit an ill-conditioned matrix."""


class NumericalRankError(SurfrepError):
    """Two independent rank methods disagreed on a matrix."""


class NotParabolicError(SurfrepError):
    """A cocycle has a nonzero class in some peripheral cokernel."""


class NotSmoothError(SurfrepError):
    """The point fails the vanishing test for the obstruction space."""


class ReducibleError(SurfrepError):
    """The representation has a commutant larger than the scalars."""


class NoConvergenceError(SurfrepError):
    """The solver exhausted its budget without reaching the tolerance."""

    def __init__(self, message, best_residual=None, history=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.history = history if history is not None else []


class ObstructionFound(SurfrepError):
    """Raised when the order-by-order deformation system is inconsistent.

    Carries the least-squares residual vector, which represents the
    obstruction class numerically.
    """

    def __init__(self, order, residual_vector, residual_norm):
        super().__init__(
            f"deformation obstructed at order {order}: "
            f"residual {residual_norm:.3e}"
        )
        self.order = order
        self.residual_vector = residual_vector
        self.residual_norm = residual_norm
