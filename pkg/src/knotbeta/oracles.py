"""Independent brute-force oracles used by the self-check suite.

None of these share code paths with the production routines they check:
they work from the raw parameterisation or the raw vertex list.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

from .knot import Knot


def adaptive_length(knot: Knot, tol: float = 1e-12) -> float:
    """Length of a smooth knot by adaptive quadrature of |c'(t)|."""
    value, _ = integrate.quad(lambda t: float(knot.speed(t)[0]), 0.0, 2 * np.pi,
                              epsabs=0.0, epsrel=tol, limit=500)
    return value


def parametric_frenet(knot: Knot, t: float):
    """(kappa, tau) from the parametric formulas at parameter t."""
    c1, c2, c3 = (knot.position(t, d)[0] for d in (1, 2, 3))
    cross = np.cross(c1, c2)
    kappa = np.linalg.norm(cross) / np.linalg.norm(c1) ** 3
    tau = np.linalg.det(np.stack([c1, c2, c3])) / (cross @ cross)
    return float(kappa), float(tau)


def polygon_points(vertices, m: int) -> tuple[np.ndarray, float]:
    """m midpoint samples, uniform in arc length, around a closed polygon."""
    v = np.asarray(vertices, dtype=float)
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(edges, axis=1)
    total = lengths.sum()
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    arc = (np.arange(m) + 0.5) * total / m
    j = np.clip(np.searchsorted(cum, arc, side="right") - 1, 0, len(v) - 1)
    frac = (arc - cum[j]) / lengths[j]
    return v[j] + frac[:, None] * edges[j], total / m


def riemann_beta(points, weight: float, s: float, block: int = 512) -> float:
    """Midpoint double sum of |p_a - p_b|^s, diagonal excluded (s > 0)."""
    total = 0.0
    for start in range(0, len(points), block):
        chunk = points[start : start + block]
        r = np.linalg.norm(chunk[:, None, :] - points[None, :, :], axis=-1)
        with np.errstate(divide="ignore"):
            vals = np.where(r > 0, r**s, 0.0)
        total += vals.sum()
    return total * weight**2


def riemann_polygon_beta(vertices, s: float, m: int = 4096) -> float:
    pts, w = polygon_points(vertices, m)
    return riemann_beta(pts, w, s)
