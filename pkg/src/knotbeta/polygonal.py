"""Beta function of polygonal knots.

The double integral splits over ordered pairs of edges:

* an edge with itself gives 2 a^(s+2) / ((s+1)(s+2)) exactly;
* two edges meeting at a vertex with angle phi give, in polar coordinates on
  the parallelogram spanned by the edges,
  (1 / sin phi) (1 / (s+2)) int_0^(pi-phi) rho(theta)^(s+2) d theta,
  whose only pole is at s = -2;
* edges that do not meet give an entire function, integrated by a tensor
  Gauss rule.

Edge j runs from vertex j to vertex j+1; the angle phi_j sits at vertex j+1
between edge j and edge j+1, with phi = pi for collinear edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import KnotError
from .knot import Knot, polygon_knot
from .quadrature import adaptive_gauss, panel_rule
from .special import DEFAULT_GUARD, MeroValue, check_guard

POLYGON_POLES = (-1.0, -2.0)


@dataclass(frozen=True, eq=False)
class PolygonGeometry:
    vertices: np.ndarray
    lengths: np.ndarray
    directions: np.ndarray
    angles: np.ndarray

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def length(self) -> float:
        return float(self.lengths.sum())

    def adjacent(self, j: int, k: int) -> bool:
        return (k - j) % self.n in (1, self.n - 1)


def polygon_geometry(poly: Knot) -> PolygonGeometry:
    if poly.kind != "polygon":
        raise KnotError("polygon geometry needs a polygonal knot")
    v = poly.vertices
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(edges, axis=1)
    dirs = edges / lengths[:, None]
    cos_phi = -np.einsum("ij,ij->i", dirs, np.roll(dirs, -1, axis=0))
    angles = np.arccos(np.clip(cos_phi, -1.0, 1.0))
    # collinear within roundoff counts as a fictitious vertex
    angles = np.where(np.pi - angles < 1e-12, np.pi, angles)
    return PolygonGeometry(v, lengths, dirs, angles)


def _as_s(s):
    s = complex(s)
    return s.real if s.imag == 0 else s


def edge_self(a: float, s, guard: float = DEFAULT_GUARD) -> MeroValue:
    """int_0^a int_0^a |x - y|^s dx dy = 2 a^(s+2) / ((s+1)(s+2))."""
    pole, dist = check_guard(s, POLYGON_POLES, guard)
    s = _as_s(s)
    return MeroValue(complex(2 * a ** (s + 2) / ((s + 1) * (s + 2))), pole, dist)


def _theta_integral(a, b, psi, s):
    """int_0^psi rho(theta)^(s+2) d theta for the parallelogram of sides a, b."""
    sp = math.sin(psi)
    theta_d = math.atan2(b * sp, a + b * math.cos(psi))
    total = 0.0
    # ray leaves through the side opposite the a-edge, then the side opposite b
    for lo, hi, rho in (
        (0.0, theta_d, lambda t: a * sp / np.sin(psi - t)),
        (theta_d, psi, lambda t: b * sp / np.sin(t)),
    ):
        if hi <= lo:
            continue
        total = total + adaptive_gauss(lambda t, rho=rho: np.exp((s + 2) * np.log(rho(t))), lo, hi)
    return total


def adjacent_pair(a: float, b: float, phi: float, s, guard: float = DEFAULT_GUARD) -> MeroValue:
    """Integral over two edges of lengths a, b meeting at angle phi."""
    if not 0 < phi <= math.pi:
        raise KnotError("vertex angle must lie in (0, pi]")
    pole, dist = check_guard(s, (-2.0,), guard)
    s = _as_s(s)
    psi = math.pi - phi
    if psi == 0.0:
        # collinear edges: |alpha + beta|^s on [0,a] x [0,b]
        if abs(complex(s) + 1) < 1e-12:
            value = (a + b) * math.log(a + b) - a * math.log(a) - b * math.log(b)
        else:
            value = ((a + b) ** (s + 2) - a ** (s + 2) - b ** (s + 2)) / ((s + 1) * (s + 2))
        return MeroValue(complex(value), pole, dist)
    value = _theta_integral(a, b, psi, s) / (math.sin(psi) * (s + 2))
    return MeroValue(complex(value), pole, dist)


def adjacent_residue(phi: float) -> float:
    """(pi - phi) / sin(phi), with its limit 1 at phi = pi."""
    psi = math.pi - phi
    if psi < 1e-8:
        return 1.0 + psi**2 / 6
    # sin(pi - phi) keeps full relative accuracy as phi -> pi
    return psi / math.sin(psi)


def _segment_distance(p0, p1, q0, q1) -> float:
    """Minimum distance between segments [p0, p1] and [q0, q1]."""
    d1, d2, r = p1 - p0, q1 - q0, p0 - q0
    a, e, f = d1 @ d1, d2 @ d2, d2 @ r
    c, b = d1 @ r, d1 @ d2
    denom = a * e - b * b
    cands = []
    if denom > 1e-14 * a * e:
        sp = np.clip((b * f - c * e) / denom, 0.0, 1.0)
        tq = np.clip((b * sp + f) / e, 0.0, 1.0)
        sp = np.clip((b * tq - c) / a, 0.0, 1.0)
        cands.append(np.linalg.norm(p0 + sp * d1 - q0 - tq * d2))
    for p in (p0, p1):
        t = np.clip((p - q0) @ d2 / e, 0.0, 1.0)
        cands.append(np.linalg.norm(p - q0 - t * d2))
    for q in (q0, q1):
        t = np.clip((q - p0) @ d1 / a, 0.0, 1.0)
        cands.append(np.linalg.norm(q - p0 - t * d1))
    return float(min(cands))


def _edge_rule(p0, p1, dist, order=20):
    length = np.linalg.norm(p1 - p0)
    m = int(min(64, max(2, math.ceil(2.0 * length / dist))))
    t, w = panel_rule(np.linspace(0.0, 1.0, m + 1), order)
    return p0 + t[:, None] * (p1 - p0), w * length


def separated_pair(p0, p1, q0, q1, s, dist: float | None = None) -> complex:
    """int over two disjoint edges of |x - y|^s (entire in s)."""
    if dist is None:
        dist = _segment_distance(p0, p1, q0, q1)
    xp, wp = _edge_rule(p0, p1, dist)
    xq, wq = _edge_rule(q0, q1, dist)
    r = np.linalg.norm(xp[:, None, :] - xq[None, :, :], axis=-1)
    return complex(wp @ np.exp(s * np.log(r)) @ wq)


def polygon_beta(poly: Knot, s, guard: float = DEFAULT_GUARD) -> MeroValue:
    """B(s) for a polygonal knot, Re(s) > -3, off the poles -1 and -2."""
    pole, dist = check_guard(s, POLYGON_POLES, guard)
    s = _as_s(s)
    if complex(s).real <= -3:
        raise ValueError("polygonal continuation is implemented for Re(s) > -3 only")
    g = polygon_geometry(poly)
    n, v, a = g.n, g.vertices, g.lengths
    total = 0.0
    for j in range(n):
        total = total + edge_self(a[j], s, guard=0.0).value
        k = (j + 1) % n
        total = total + 2 * adjacent_pair(a[j], a[k], g.angles[j], s, guard=0.0).value
    for j in range(n):
        for k in range(j + 1, n):
            if g.adjacent(j, k):
                continue
            p0, p1 = v[j], v[(j + 1) % n]
            q0, q1 = v[k], v[(k + 1) % n]
            d = _segment_distance(p0, p1, q0, q1)
            if d < 1e-9 * g.length:
                raise KnotError(f"edges {j} and {k} intersect; the integral diverges")
            total = total + 2 * separated_pair(p0, p1, q0, q1, s, d)
    return MeroValue(complex(total), pole, dist)


def polygon_residues(poly: Knot) -> tuple[float, float]:
    """(Res at -1, Res at -2) = (2 l, -2n + 2 sum (pi - phi_j)/sin phi_j)."""
    g = polygon_geometry(poly)
    res1 = 2 * g.length
    res2 = -2 * g.n + 2 * sum(adjacent_residue(phi) for phi in g.angles)
    if not (res1 > 0 and res2 > 0):
        raise ArithmeticError("polygon residues must be positive")
    return res1, res2


def split_edge(poly: Knot, edge: int, fraction: float = 0.5) -> Knot:
    """Insert a vertex with angle pi inside edge ``edge``."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    v = poly.vertices
    n = len(v)
    j = edge % n
    new = v[j] + fraction * (v[(j + 1) % n] - v[j])
    return polygon_knot(np.insert(v, j + 1, new, axis=0), name=poly.name)


def regular_polygon(n: int, side: float = 1.0) -> Knot:
    radius = side / (2 * math.sin(math.pi / n))
    t = 2 * np.pi * np.arange(n) / n
    return polygon_knot(np.stack([radius * np.cos(t), radius * np.sin(t), np.zeros(n)], axis=1))


def unit_square() -> Knot:
    return polygon_knot([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], name="unit square")


def random_polygon(rng: np.random.Generator, n_min: int = 3, n_max: int = 9,
                   z_jitter: float = 0.3) -> Knot:
    """Random simple polygon: star-shaped about the origin, lifted off its plane.

    Sorted polar angles with gaps kept below pi make the planar shadow a
    simple polygon, so the lifted one is embedded as well.
    """
    n = int(rng.integers(n_min, n_max + 1))
    while True:
        theta = np.sort(rng.uniform(0, 2 * np.pi, n))
        gaps = np.diff(np.append(theta, theta[0] + 2 * np.pi))
        if gaps.max() < 0.9 * np.pi and gaps.min() > 0.05:
            break
    radius = rng.uniform(0.5, 1.5, n)
    z = rng.uniform(-z_jitter, z_jitter, n)
    return polygon_knot(np.stack([radius * np.cos(theta), radius * np.sin(theta), z], axis=1))
