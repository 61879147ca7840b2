"""Gradient field of B_s, Poisson brackets of beta functionals, and the
second-order operator P with P B_s = s(s-1) B_{s-2}.

Conventions
-----------
Varying the point gamma(x) (arc-length measure held fixed) gives

    dB_s(x) = 2 s int |Delta|^(s-2) Delta dy,    Delta = gamma(x) - gamma(y),

which is the ``"derived"`` convention.  The ``"printed"`` convention reproduces
the historical formula with exponent s-1 and prefactor -2s, and the triple
integral with prefactor +4su; it exists for side-by-side comparison only.

The bracket is {f, g} = -l^(-2) int det(T, df, dg) dx.  In the derived
convention this equals -4su l^(-2) int det(T, A_s, A_u) dx with
A_s(x) = int |Delta|^(s-2) Delta dy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .continuation import (
    ContinuationConfig,
    _panels,
    _real_if_possible,
    _symmetric,
    beta_direct,
    resolve_config,
)
from .errors import ConfigError
from .jets import chord_series, series_pow
from .knot import ArcFrame, knot_from_samples, resample_arclength
from .quadrature import graded_rule
from .special import check_guard

CONVENTIONS = ("derived", "printed")


def _exponent_shift(convention: str) -> int:
    if convention not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {CONVENTIONS}")
    return -2 if convention == "derived" else -1


@dataclass
class GradientField:
    """Vector field dB_s sampled at the frame nodes."""

    values: np.ndarray  # (N, 3)
    s: float
    convention: str
    x: np.ndarray

    def magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)


def kernel_poles(s, shift: int, order: int) -> list[float]:
    """Poles of A(s) = int |Delta|^(s+shift) Delta dy below the convergent range."""
    return [float(-shift - 2 - i) for i in range(1, order + 1, 2)]


def _vector_series(frame: ArcFrame, s, shift: int):
    """V_i(s, x), the h^i coefficients of G^((s+shift)/2) * chord(h)/h."""
    R = frame.order - 1
    P = series_pow(chord_series(frame, None, R), shift).at(s)  # (R+1, N)
    W = [frame.derivs[p + 1] / math.factorial(p + 1) for p in range(R + 1)]
    V = []
    for i in range(R + 1):
        V.append(sum(P[k][:, None] * W[i - k] for k in range(i + 1)))
    return V


def vector_kernel(frame: ArcFrame, s, shift: int = -2,
                  cfg: ContinuationConfig | None = None) -> np.ndarray:
    """A(x) = int |gamma(x) - gamma(y)|^(s+shift) (gamma(x) - gamma(y)) dy, continued in s.

    The integrand is -sign(h) |h|^(q+1) G^(q/2) chord(h)/h with q = s+shift
    and y = x+h.  Odd powers h^i of the series survive the symmetric
    integration over |h| < eps and give 2 eps^(q+i+2)/(q+i+2), so the
    continuation has simple poles at q = -i-2 for odd i.
    """
    cfg = resolve_config(frame, cfg or ContinuationConfig())
    s = _real_if_possible(s)
    q = s + shift
    r, eps, h_sw, l = cfg.order, cfg.epsilon, cfg.h_switch, frame.length
    if complex(q).real <= -r - 2 + cfg.margin:
        raise ConfigError(f"vector kernel needs Re(s) > {-r - 2 - shift + cfg.margin}")
    check_guard(s, kernel_poles(s, shift, frame.order), cfg.guard)
    V = _vector_series(frame, s, shift)
    R = len(V) - 1

    sing = 0.0
    for i in range(1, r, 2):
        sing = sing - 2 * eps ** (q + i + 2) / (q + i + 2) * V[i]
    tail = 0.0
    for i in range(r + (r % 2 == 0), R + 1, 2):
        tail = tail - 2 * h_sw ** (q + i + 2) / (q + i + 2) * V[i]

    h, wh = _panels(eps, l / 2, cfg, l, cfg.gauss_order)
    h, wh = _symmetric(h, wh)
    c = frame.chord(h)
    logc2 = np.log(np.einsum("hnk,hnk->hn", c, c))
    far = -np.einsum("h,hn,hnk->nk", wh, np.exp((q / 2) * logc2), c)

    rem = 0.0
    if h_sw < eps:
        h, wh = _panels(h_sw, eps, cfg, l, cfg.gauss_order)
        h, wh = _symmetric(h, wh)
        c = frame.chord(h)
        G = np.einsum("hnk,hnk->hn", c, c) / h[:, None] ** 2
        exact = np.exp((q / 2) * np.log(G))[:, :, None] * c / h[:, None, None]
        poly = sum(V[i][None] * h[:, None, None] ** i for i in range(r))
        scale = np.sign(h) * np.exp((q + 1) * np.log(np.abs(h)))
        rem = -np.einsum("h,h,hnk->nk", wh, scale, exact - poly)
    return far + sing + rem + tail


def gradient_field(frame: ArcFrame, s: float, convention: str = "derived",
                   cfg: ContinuationConfig | None = None) -> GradientField:
    """dB_s along the knot for real s > 1."""
    if not s > 1:
        raise ConfigError("gradient field needs s > 1")
    shift = _exponent_shift(convention)
    A = vector_kernel(frame, s, shift, cfg).real
    factor = 2 * s if convention == "derived" else -2 * s
    return GradientField(factor * A, float(s), convention, frame.x.copy())


def row_power_integral(frame: ArcFrame, s: float, order: int = 16) -> np.ndarray:
    """F(x) = int |gamma(x) - gamma(y)|^s dy at every node, for s > 0."""
    if not s > 0:
        raise ConfigError("row integral needs s > 0")
    cfg = ContinuationConfig()
    l = frame.length
    h0 = cfg.max_panel * l
    hg, wg = graded_rule([h0], order=order, ratio=cfg.panel_ratio, depth=1e-16)
    hf, wf = _panels(h0, l / 2, cfg, l, order)
    h, wh = _symmetric(np.concatenate([hg, hf]), np.concatenate([wg, wf]))
    c = frame.chord(h)
    return np.einsum("h,hn->n", wh, np.exp((s / 2) * np.log(np.einsum("hnk,hnk->hn", c, c))))


@dataclass
class FirstVariation:
    """Central-difference derivative of B_s against its prediction from dB_s."""

    finite_difference: float
    predicted: float
    point_term: float
    measure_term: float

    @property
    def relative_error(self) -> float:
        return abs(self.finite_difference - self.predicted) / abs(self.finite_difference)


def normal_bump(frame: ArcFrame, center: float = 0.0, width: float = 0.15) -> np.ndarray:
    """Smooth periodic bump profile phi(x) (width as a fraction of the length)."""
    theta = 2 * np.pi * (frame.x - center) / frame.length
    return np.exp((np.cos(theta) - 1) / (2 * np.pi * width) ** 2)


def _spectral_derivative(frame: ArcFrame, values: np.ndarray) -> np.ndarray:
    coef = np.fft.rfft(values, axis=0)
    k = frame.wavenumbers
    return np.fft.irfft(1j * k[:, None] * coef, n=frame.n, axis=0)


def first_variation_check(frame: ArcFrame, s: float, delta=None, step: float = 1e-4,
                          N: int | None = None) -> FirstVariation:
    """Compare (B_s(K + t delta) - B_s(K - t delta)) / 2t with the gradient.

    ``delta`` is a vector field at the nodes, by default a normal bump
    phi N.  The prediction adds the variation of the arc-length measure,
    d(dx) = T . delta' dx (equal to -kappa phi dx for phi N), to the point
    term int dB_s . delta dx.
    """
    if delta is None:
        delta = normal_bump(frame)[:, None] * frame.normal()
    delta = np.asarray(delta, dtype=float)
    N = N or 2 * frame.n
    values = []
    for t in (step, -step):
        knot = knot_from_samples(frame.points + t * delta)
        values.append(beta_direct(resample_arclength(knot, N), s).real)
    fd = (values[0] - values[1]) / (2 * step)
    g = gradient_field(frame, s).values
    w = frame.weight
    point = w * float(np.sum(g * delta))
    stretch = np.einsum("nk,nk->n", frame.tangent, _spectral_derivative(frame, delta))
    measure = 2 * w * float(np.sum(stretch * row_power_integral(frame, s)))
    return FirstVariation(fd, point + measure, point, measure)


def _prefactor(s, u, convention: str, length: float):
    sign = -1.0 if convention == "derived" else 1.0
    return sign * 4 * s * u / length**2


def _triple_sum(frame: ArcFrame, s, u, shift: int) -> float:
    """Explicit O(N^3) grid sum of |Dy|^(s+shift) |Dz|^(u+shift) det(T, Dy, Dz)."""
    pts, T, n = frame.points, frame.tangent, frame.n
    total = 0.0
    for i in range(n):
        D = pts[i] - pts  # (N, 3), zero row at i
        r = np.linalg.norm(D, axis=1)
        r[i] = 1.0
        ws = r ** (s + shift)
        wu = r ** (u + shift)
        ws[i] = wu[i] = 0.0
        # det(T, Dy, Dz) = (T x Dy) . Dz for all pairs (y, z)
        cross = np.cross(T[i], D)
        dets = cross @ D.T
        total += ws @ dets @ wu
    return total * frame.weight**3


def poisson_bracket(frame: ArcFrame, s, u, method: str = "kernel", convention: str = "derived",
                    cfg: ContinuationConfig | None = None) -> float:
    """{B_s, B_u} for s, u > -2.

    ``kernel`` contracts the continued vector kernels A_s, A_u (valid across
    the poles of the kernels, which lie in the convergent region of the
    bracket only through the det factor); ``triple`` is the plain O(N^3) sum
    over the frame grid, accurate when the integrand is smooth (s, u >= 2);
    ``gradient`` contracts gradient fields, for s, u > 1.
    """
    s, u = _real_if_possible(s), _real_if_possible(u)
    if complex(s).real <= -2 or complex(u).real <= -2:
        raise ConfigError("Poisson bracket diverges for s <= -2 or u <= -2")
    shift = _exponent_shift(convention)
    l, w, T = frame.length, frame.weight, frame.tangent
    if method == "triple":
        return float(np.real(_prefactor(s, u, convention, l) * _triple_sum(frame, s, u, shift)))
    if method == "gradient":
        gs = gradient_field(frame, s, convention, cfg).values
        gu = gradient_field(frame, u, convention, cfg).values
        return float(-w / l**2 * np.sum(np.einsum("nk,nk->n", T, np.cross(gs, gu))))
    if method != "kernel":
        raise ConfigError(f"unknown bracket method {method!r}")
    As = vector_kernel(frame, s, shift, cfg)
    Au = As if u == s else vector_kernel(frame, u, shift, cfg)
    det = np.einsum("nk,nk->n", T, np.cross(As, Au))
    return float(np.real(_prefactor(s, u, convention, l) * w * np.sum(det)))


def length_bracket(frame: ArcFrame, u, cfg: ContinuationConfig | None = None) -> float:
    """{l, B_u} with dl = -kappa N, i.e. 2u l^(-2) int kappa B . A_u dx."""
    Au = vector_kernel(frame, u, -2, cfg).real
    T, Nn = frame.tangent, frame.normal()
    binormal = np.cross(T, Nn)
    return float(2 * u / frame.length**2 * frame.weight
                 * np.sum(frame.kappa * np.einsum("nk,nk->n", binormal, Au)))


def bracket_length_commutation(frame: ArcFrame, u, delta: float = 1e-2, convention: str = "derived",
                               cfg: ContinuationConfig | None = None) -> float:
    """Residue in s of {B_s, B_u} at s = -1 from (s+1)-weighted values at -1 +- delta."""
    cfg = ContinuationConfig(guard=0.0) if cfg is None else cfg
    plus = poisson_bracket(frame, -1 + delta, u, convention=convention, cfg=cfg)
    minus = poisson_bracket(frame, -1 - delta, u, convention=convention, cfg=cfg)
    return delta * (plus - minus) / 2


@dataclass
class BernsteinResult:
    s: float
    lhs: float
    rhs: float

    @property
    def relative_error(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.rhs)


def kernel_hessian(v: np.ndarray, s: float) -> np.ndarray:
    """Hessian of |v|^s: s |v|^(s-2) (I + (s-2) v v^T / |v|^2), batched over rows."""
    r2 = np.einsum("...k,...k->...", v, v)
    vv = np.einsum("...i,...j->...ij", v, v) / r2[..., None, None]
    eye = np.broadcast_to(np.eye(3), vv.shape)
    return (s * r2 ** (s / 2 - 1))[..., None, None] * (eye + (s - 2) * vv)


def bernstein_apply(frame: ArcFrame, s: float, order: int = 16) -> BernsteinResult:
    """P B_s through the analytic Hessian of the kernel, against s(s-1) B_{s-2}."""
    if not s > 2:
        raise ConfigError("Bernstein identity is checked for s > 2")
    cfg = ContinuationConfig()
    l = frame.length
    h0 = cfg.max_panel * l
    hg, wg = graded_rule([h0], order=order, ratio=cfg.panel_ratio, depth=1e-16)
    hf, wf = _panels(h0, l / 2, cfg, l, order)
    h, wh = _symmetric(np.concatenate([hg, hf]), np.concatenate([wg, wf]))
    lhs = 0.0
    for k in range(0, len(h), 64):
        c = -frame.chord(h[k:k + 64])  # gamma(x) - gamma(y)
        H = kernel_hessian(c, s)
        wdir = c / np.linalg.norm(c, axis=-1, keepdims=True)
        contraction = np.einsum("hni,hnij,hnj->hn", wdir, H, wdir)
        lhs += float(np.einsum("h,hn->", wh[k:k + 64], contraction))
    lhs *= frame.weight
    rhs = s * (s - 1) * beta_direct(frame, s - 2, order=order).real
    return BernsteinResult(float(s), lhs, rhs)


def discrete_hessian_contraction(points, weight: float, i: int, j: int, s: float,
                                 step: float = 1e-4) -> tuple[float, float]:
    """Mixed second difference of the sampled double sum along w(x_i, x_j).

    B = weight^2 sum_{a,b} |p_a - p_b|^s.  Moving p_i by a w and p_j by b w
    changes only the (i, j) and (j, i) terms, which are differenced alone;
    the mixed derivative is -2 weight^2 <H w, w>, so the contraction is
    -D / (2 weight^2).  Returns (difference estimate, s(s-1)|p_i - p_j|^(s-2)).
    """
    p = np.asarray(points, dtype=float)
    v = p[i] - p[j]
    dist = float(np.linalg.norm(v))
    wdir = v / dist

    def pair(a, b):
        return 2 * weight**2 * np.linalg.norm(v + (a - b) * wdir) ** s

    t = step * dist
    mixed = (pair(t, t) - pair(t, -t) - pair(-t, t) + pair(-t, -t)) / (4 * t * t)
    return -mixed / (2 * weight**2), s * (s - 1) * dist ** (s - 2)


def gelfand_shilov_check(n: int, z, s: float, step: float = 1e-3) -> tuple[float, float]:
    """(1/4) Laplacian of f^s by Richardson-extrapolated differences vs s(s-1+n/2) f^(s-1)."""
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != n:
        raise ValueError("point dimension does not match n")
    f = lambda p: float(p @ p)
    if not f(z) > 0:
        raise ValueError("f(z) must be positive")

    def laplacian(hh):
        total = 0.0
        for k in range(n):
            e = np.zeros(n)
            e[k] = hh
            total += (f(z + e) ** s - 2 * f(z) ** s + f(z - e) ** s) / hh**2
        return total

    lap = (4 * laplacian(step / 2) - laplacian(step)) / 3
    return lap / 4, s * (s - 1 + n / 2) * f(z) ** (s - 1)
