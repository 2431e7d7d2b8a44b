"""Exception types raised across the package."""


class DegenerateParametersError(ValueError):
    """Raised when p1*p4 == p2*p3, or some p_i is not strictly positive."""


class OutOfLatticeError(ValueError):
    """A point (x, y) does not belong to the triangular lattice T_N."""


class LatticeMismatchError(ValueError):
    """An operator or grid function was combined with an incompatible lattice."""


class BoundaryCoefficientError(RuntimeError):
    """A stencil term reaches outside T_N with a coefficient that does not vanish."""


class PropagationError(RuntimeError):
    """Zero pivot while sweeping the recurrence relations over the lattice."""
