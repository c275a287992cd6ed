"""Exception types shared across the package."""


class NonNormalizableStateError(ValueError):
    """Gaussian parameters give a non-normalizable state (Im(1/rho) <= 0)."""


class GridConfigError(ValueError):
    """Grid does not satisfy the resolution or coverage requirements."""


class ValidityDomainError(ValueError):
    """Parameters left the perturbative validity domain of the far-field kernel.

    Carries the dimensionless ratio t^2 * |V0| * l1 / (m * l2^2 * L) that
    violated the bound.
    """

    def __init__(self, message: str, ratio: float):
        super().__init__(f"{message} (validity ratio = {ratio:.6g})")
        self.ratio = ratio


class PoleError(ValueError):
    """Thin-lens map hit its pole (rho_minus = -f on the real axis)."""


class OscillationResolutionError(ValueError):
    """Source grid too coarse for the propagator's phase oscillations."""


class BoundaryContaminationError(RuntimeError):
    """Wave-packet tail reached the grid boundary during propagation."""


class ChebyshevPlanningError(ValueError):
    """Polynomial-expansion plan could not be built for the requested tolerance."""


class ShootingConvergenceError(RuntimeError):
    """Two-point boundary-value shooting failed to converge."""


class DifferentiationError(RuntimeError):
    """Finite-difference stencil produced non-finite values."""
