"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
numeric failures (QuadratureError and friends) -> 3, RegimeError -> 4.
"""


class SonicBHError(Exception):
    """Base class for package errors."""


class ConfigError(SonicBHError):
    """Malformed configuration document or violated parameter invariant."""


class RegimeError(SonicBHError):
    """Request outside the validity regime of a formula (refused, not extrapolated)."""


class RegionError(SonicBHError):
    """Point lies outside the spatial region a closed form is valid in."""


class RegionExitError(SonicBHError):
    """A single-region characteristic left its region before the requested time."""

    def __init__(self, message, exit_time):
        super().__init__(message)
        self.exit_time = exit_time


class QuadratureError(SonicBHError):
    """Numerical integration did not converge.  Carries the partial result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ExtrapolationError(QuadratureError):
    """Regulator-removal extrapolation failed to settle."""


class SingularIntegrandError(SonicBHError):
    """Integration path crosses a horizon without an exclusion width."""


class StabilityError(SonicBHError):
    """Lattice integration exceeded its stability bound."""


class RegimeWarning(UserWarning):
    """Result produced outside its nominal validity regime."""
