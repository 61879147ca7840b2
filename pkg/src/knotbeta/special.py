"""Gamma function and the closed-form beta function of a round circle."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import PoleProximityError

# Lanczos coefficients, g = 7, n = 9 (Godfrey); about 15 correct digits.
_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
DEFAULT_GUARD = 1e-3


@dataclass(frozen=True)
class MeroValue:
    """Value of a meromorphic function together with pole bookkeeping."""

    value: complex
    nearest_pole: float | None
    distance_to_pole: float
    error_estimate: float = 0.0
    reliable: bool = True

    @property
    def real(self) -> float:
        return self.value.real

    def __complex__(self):
        return complex(self.value)


def odd_pole(s) -> float | None:
    """Nearest point of {-1, -3, -5, ...} to s."""
    re = complex(s).real
    j = max(0, round((-re - 1) / 2))
    return -2.0 * j - 1.0


def check_guard(s, poles, guard: float):
    """Nearest pole and distance; raise if closer than ``guard``."""
    best, dist = None, math.inf
    for p in poles:
        if p is None:
            continue
        d = abs(complex(s) - p)
        if d < dist:
            best, dist = p, d
    if best is not None and dist < guard:
        raise PoleProximityError(s, best, guard)
    return best, dist


def _as_number(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


def _nonpositive_integer(z, tol: float) -> bool:
    z = complex(z)
    return abs(z.imag) <= tol and z.real < 0.5 and abs(z.real - round(z.real)) <= tol and round(z.real) <= 0


def _lanczos(z):
    # z already shifted so that Re(z) >= 0.5
    z = z - 1
    x = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        x += c / (z + i)
    t = z + _G + 0.5
    if isinstance(z, complex):
        return math.sqrt(2 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * x
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * math.exp(-t) * x


def gamma(z, guard: float = 1e-12):
    """Gamma(z) for real or complex z; reflection below Re(z) = 1/2."""
    z = _as_number(z)
    if _nonpositive_integer(z, guard):
        raise PoleProximityError(z, float(round(complex(z).real)), guard)
    if complex(z).real < 0.5:
        sin = cmath.sin if isinstance(z, complex) else math.sin
        return math.pi / (sin(math.pi * z) * gamma(1 - z, guard))
    return _lanczos(z)


def rgamma(z):
    """1/Gamma(z); exactly zero at the poles of Gamma."""
    z = _as_number(z)
    if _nonpositive_integer(z, 0.0):
        return 0.0
    return 1.0 / gamma(z, guard=0.0)


def circle_beta_value(s, radius: float = 1.0):
    """Closed form 2^(s+2) pi^(3/2) Gamma((s+1)/2) / Gamma(s/2+1) * radius^(s+2)."""
    s = _as_number(s)
    num = gamma((s + 1) / 2, guard=0.0)
    return 2 ** (s + 2) * math.pi**1.5 * num * rgamma(s / 2 + 1) * radius ** (s + 2)


def circle_beta(s, radius: float = 1.0, guard: float = DEFAULT_GUARD) -> MeroValue:
    """Beta function of a round circle of the given radius."""
    pole, dist = check_guard(s, [odd_pole(s)], guard)
    value = complex(circle_beta_value(s, radius))
    return MeroValue(value, pole, dist, error_estimate=1e-14 * abs(value))


def circle_residue(j: int, radius: float = 1.0) -> float:
    """Residue of the circle beta function at s = -2j-1.

    Gamma((s+1)/2) has residue (-1)^j / j! in its own argument, hence
    2 (-1)^j / j! in s.
    """
    if j < 0:
        raise ValueError("j must be non-negative")
    s = -2 * j - 1
    res_gamma = 2 * (-1) ** j / math.factorial(j)
    return 2.0 ** (s + 2) * math.pi**1.5 * res_gamma * rgamma(s / 2 + 1) * radius ** (s + 2)


def functional_equation_defect(s, radius: float = 1.0, beta=None) -> float:
    """|B(s) - 4 rho^2 (s-1)/s B(s-2)| / |B(s)|.

    ``beta`` maps s to B(s); it defaults to the closed form.  The factor
    rho^2 accounts for a circle of radius rho (it is 1 for the unit circle).
    """
    if s == 0:
        raise ValueError("functional equation needs s != 0")
    if beta is None:
        beta = lambda z: circle_beta_value(z, radius)
    b_s = complex(beta(s))
    b_m2 = complex(beta(s - 2))
    return abs(b_s - 4 * radius**2 * (s - 1) / s * b_m2) / abs(b_s)
