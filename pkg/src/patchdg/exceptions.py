"""Exception types raised by the solver pipeline."""


class PatchDGError(Exception):
    """Base class for all library errors."""


class AssumptionViolation(PatchDGError):
    """A geometric mesh/interface assumption failed.

    ``which`` is 1 (a face is crossed more than once) or 2 (a cut element
    has no interior Moore neighbor on one side).
    """

    def __init__(self, which, message):
        self.which = which
        super().__init__(f"assumption {which} violated: {message}")


class NoConvergence(PatchDGError):
    """An iterative root find or projection failed to converge."""


class EmptyRegion(PatchDGError):
    """A quadrature rule was requested over a region of zero measure."""


class DegenerateGradient(PatchDGError):
    """The level-set gradient vanished near the interface."""


class PatchTooSmall(PatchDGError):
    """A subdomain has too few interior elements to fit degree m."""


class RankDeficient(PatchDGError):
    """The least-squares design matrix lost full column rank."""


class NotPositiveDefinite(PatchDGError):
    """Symmetric factorization met a nonpositive pivot (penalty too small)."""

    def __init__(self, pivot_index, pivot_value):
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value
        super().__init__(
            f"nonpositive pivot {pivot_value:.3e} at index {pivot_index}; "
            "the penalty eta is likely too small"
        )


class SingularMatrix(PatchDGError):
    """The assembled system is singular."""


class NonMonotoneH(PatchDGError):
    """Convergence-table mesh sizes are not strictly decreasing."""


class ConfigError(PatchDGError):
    """Invalid run configuration."""
