"""Exception types raised by the library."""


class KnotBetaError(Exception):
    """Base class for all library errors."""


class KnotError(KnotBetaError, ValueError):
    """Invalid or degenerate knot description."""


class ResampleError(KnotBetaError):
    """Arc-length resampling failed or produced an under-resolved frame."""


class PoleProximityError(KnotBetaError, ValueError):
    """Evaluation requested within the guard radius of a pole."""

    def __init__(self, s, pole, guard):
        self.s = s
        self.pole = pole
        self.guard = guard
        super().__init__(
            f"s={s} lies within guard radius {guard:g} of the pole at {pole:g}"
        )


class ConfigError(KnotBetaError, ValueError):
    """Configuration violates a precondition (order, strip width, range of s)."""


class CurvatureError(KnotBetaError, ValueError):
    """Curvature too small for a quantity that divides by it."""
