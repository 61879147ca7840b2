"""Truncated power series in the chord offset h.

The squared chord of an arc-length curve factors as

    |gamma(x+h) - gamma(x)|^2 = h^2 G(h),   G(h) = 1 + sum_m f_m h^m,

and the s-th power of the chord is |h|^s G(h)^(s/2).  The coefficients of
G^(s/2) are polynomials in s; :class:`SPoly` carries them densely, batched
over the samples of an :class:`~knotbeta.knot.ArcFrame`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import ConfigError, CurvatureError
from .knot import KAPPA_MIN, ArcFrame


class SPoly:
    """Dense polynomial in s; ``c[d]`` (an array over samples) multiplies s**d."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)
        if self.c.ndim == 0:
            self.c = self.c[None]

    @classmethod
    def const(cls, value):
        return cls(np.asarray(value, dtype=float)[None])

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.any(self.c.reshape(len(self.c), -1) != 0, axis=1))[0]
        return int(nz[-1]) if len(nz) else 0

    def _coerce(self, other):
        return other if isinstance(other, SPoly) else SPoly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.c), len(other.c))
        shape = np.broadcast_shapes(self.c.shape[1:], other.c.shape[1:])
        out = np.zeros((n,) + shape)
        out[: len(self.c)] += self.c
        out[: len(other.c)] += other.c
        return SPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return SPoly(-self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SPoly):
            return SPoly(self.c * np.asarray(other, dtype=float))
        n = len(self.c) + len(other.c) - 1
        shape = np.broadcast_shapes(self.c.shape[1:], other.c.shape[1:])
        out = np.zeros((n,) + shape)
        for i, ci in enumerate(self.c):
            out[i : i + len(other.c)] += ci * other.c
        return SPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SPoly(self.c / scalar)

    def __call__(self, s):
        """Evaluate at s (Horner); real s stays real."""
        out = np.zeros(self.c.shape[1:], dtype=np.result_type(self.c, s))
        for ci in self.c[::-1]:
            out = out * s + ci
        return out


def power_coefficients(a, alpha, one):
    """Coefficients of (sum_k a_k h^k)^alpha for a_0 = 1.

    Works over any ring whose elements support +, * and division by an
    integer: the recurrence is i b_i = sum_k ((alpha+1) k - i) a_k b_{i-k}.
    """
    b = [one]
    for i in range(1, len(a)):
        acc = 0
        for k in range(1, i + 1):
            acc = acc + ((alpha + 1) * k - i) * a[k] * b[i - k]
        b.append(acc / i)
    return b


@dataclass
class HSeries:
    """Truncated series sum_{i<=order} c_i h^i with SPoly coefficients."""

    coeffs: list

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def at(self, s) -> np.ndarray:
        """Numeric coefficients at a fixed exponent s, shape ``(order+1, ...)``."""
        return np.stack([c(s) for c in self.coeffs])

    def degrees(self) -> list[int]:
        return [c.degree for c in self.coeffs]

    def __call__(self, h, s=0.0):
        co = self.at(s)
        return sum(ci * h**i for i, ci in enumerate(co))


def _samples(frame: ArcFrame, i):
    return slice(None) if i is None else i


def chord_series(frame: ArcFrame, i=None, r: int = 8) -> HSeries:
    """G(h) = |gamma(x_i+h) - gamma(x_i)|^2 / h^2 through order r.

    f_m = sum over p+q = m+2 (p, q >= 1) of gamma^(p).gamma^(q) / (p! q!).
    With ``i=None`` every sample is returned at once.
    """
    if frame.order < r + 1:
        raise ConfigError(f"order r={r} needs derivatives up to {r + 1}, frame has {frame.order}")
    idx = _samples(frame, i)
    d = frame.derivs[:, idx]
    coeffs = [SPoly.const(np.ones(d.shape[1:-1]))]
    for m in range(1, r + 1):
        acc = 0.0
        for p in range(1, m + 2):
            q = m + 2 - p
            acc = acc + np.sum(d[p] * d[q], axis=-1) / (factorial(p) * factorial(q))
        coeffs.append(SPoly.const(acc))
    return HSeries(coeffs)


def series_pow(G: HSeries, shift: float = 0.0) -> HSeries:
    """G^((s+shift)/2) as a series whose coefficients are polynomials in s."""
    first = G.coeffs[0]
    if np.max(np.abs(first.c[0] - 1.0)) > 1e-12 or first.degree > 0:
        raise ValueError("series_pow needs leading coefficient 1")
    alpha = SPoly([shift / 2, 0.5])
    one = SPoly.const(np.ones(first.c.shape[1:]))
    return HSeries(power_coefficients(G.coeffs, alpha, one))


def frenet_reduce(frame: ArcFrame, i: int) -> dict:
    """Dot products of derivatives at sample i next to their Frenet forms.

    Returns ``{name: (dot_product, frenet_expression)}``.
    """
    k, tau, dk = frame.kappa[i], frame.tau[i], frame.dkappa[i]
    if k < KAPPA_MIN:
        raise CurvatureError("Frenet reduction needs nonzero curvature")
    g = frame.derivs[:, i]
    return {
        "g2.g2": (g[2] @ g[2], k**2),
        "g1.g3": (g[1] @ g[3], -(k**2)),
        "g2.g3": (g[2] @ g[3], k * dk),
        "g3.g3": (g[3] @ g[3], k**4 + dk**2 + k**2 * tau**2),
        "g1.g4": (g[1] @ g[4], -3 * k * dk),
    }
