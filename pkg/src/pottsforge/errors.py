"""Shared exception types."""


class EnumerationCapError(RuntimeError):
    """Instance too large for an exact enumeration oracle."""


class CouplingViolationError(AssertionError):
    """A monotone coupling produced a containment violation (should be
    impossible; raised hard because the invariant is the point)."""


class NoCrossingError(RuntimeError):
    """The tuner's grid contains no point satisfying the balance sandwich."""

    def __init__(self, message, *, rho_lo=None, zeta_lo=None, rho_hi=None,
                 zeta_hi=None, window=None, grid_points=None):
        super().__init__(message)
        self.rho_lo = rho_lo
        self.zeta_lo = zeta_lo
        self.rho_hi = rho_hi
        self.zeta_hi = zeta_hi
        self.window = window
        self.grid_points = grid_points
