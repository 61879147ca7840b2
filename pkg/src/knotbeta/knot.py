"""Knot representations, arc-length resampling and Frenet invariants.

A smooth knot is stored as a trigonometric polynomial

    c(t) = a_0 + sum_k (a_k cos kt + b_k sin kt),   t in [0, 2 pi)

per coordinate (torus knots and circles are converted to this form exactly).
Polygonal knots keep their vertex list.  :func:`resample_arclength` turns a
smooth knot into an :class:`ArcFrame`: uniform arc-length samples together
with spectrally computed arc-length derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CurvatureError, KnotError, ResampleError

SMOOTH_KINDS = ("fourier", "torus", "circle")
KAPPA_MIN = 1e-10


@dataclass(frozen=True, eq=False)
class Knot:
    """A closed space curve.

    ``kind`` is one of ``fourier``, ``torus``, ``circle`` (all smooth, stored
    through the cosine/sine coefficient arrays ``a`` and ``b`` of shape
    ``(3, K+1)``) or ``polygon`` (stored through ``vertices``).  ``params``
    keeps the preset parameters for reporting.
    """

    kind: str
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    vertices: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    name: str = ""

    @property
    def smooth(self) -> bool:
        return self.kind in SMOOTH_KINDS

    @property
    def degree(self) -> int:
        return self.a.shape[1] - 1

    def position(self, t, deriv: int = 0) -> np.ndarray:
        """``deriv``-th parameter derivative of c(t); shape ``(len(t), 3)``."""
        if not self.smooth:
            raise KnotError("position(t) is defined for smooth knots only")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.arange(self.degree + 1)
        kt = np.outer(t, k)
        # d^n/dt^n of cos(kt), sin(kt) via a phase shift of n*pi/2
        shift = deriv * np.pi / 2
        scale = k.astype(float) ** deriv
        cos_part = np.cos(kt + shift) * scale
        sin_part = np.sin(kt + shift) * scale
        if deriv == 0:
            return cos_part @ self.a.T + sin_part @ self.b.T
        return cos_part[:, 1:] @ self.a[:, 1:].T + sin_part[:, 1:] @ self.b[:, 1:].T

    def speed(self, t) -> np.ndarray:
        return np.linalg.norm(self.position(t, 1), axis=1)

    def transformed(self, rotation=None, shift=None, scale: float = 1.0) -> "Knot":
        """Image under x -> scale * rotation @ x + shift."""
        rot = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        off = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
        if self.smooth:
            a = scale * rot @ self.a
            b = scale * rot @ self.b
            a[:, 0] += off
            return Knot("fourier", a=a, b=b, params=dict(self.params), name=self.name)
        verts = scale * self.vertices @ rot.T + off
        return Knot("polygon", vertices=verts, params=dict(self.params), name=self.name)

    def rephased(self, c: float) -> "Knot":
        """Same curve with parameter shifted, t -> t + c."""
        k = np.arange(self.degree + 1)
        cs, sn = np.cos(k * c), np.sin(k * c)
        a = self.a * cs + self.b * sn
        b = self.b * cs - self.a * sn
        return Knot("fourier", a=a, b=b, params=dict(self.params), name=self.name)


def _check_speed(knot: Knot, samples: int = 4096) -> None:
    t = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    v = knot.speed(t)
    if not np.all(np.isfinite(v)) or v.max() == 0.0:
        raise KnotError("curve has vanishing or non-finite speed")
    if v.min() < 1e-8 * v.max():
        raise KnotError(f"degenerate speed: min |c'(t)| = {v.min():.3e}")


def fourier_knot(coords, name: str = "") -> Knot:
    """Build a knot from ``[(a_x, b_x), (a_y, b_y), (a_z, b_z)]``.

    ``b`` lists may omit the (unused) constant term; they are aligned so that
    ``b[k]`` multiplies ``sin kt`` when given with the same length as ``a``,
    and ``sin (k+1)t`` when one shorter.
    """
    if len(coords) != 3:
        raise KnotError("fourier knot needs x, y and z coefficient lists")
    rows = []
    for a_list, b_list in coords:
        a_arr = np.asarray(a_list if a_list is not None else [0.0], dtype=float)
        b_arr = np.asarray(b_list if b_list is not None else [], dtype=float)
        if len(b_arr) == max(len(a_arr) - 1, 0) and len(b_arr) != len(a_arr):
            b_arr = np.concatenate([[0.0], b_arr])
        rows.append((a_arr, b_arr))
    K = max(max(len(a), len(b)) for a, b in rows) - 1
    if K < 1:
        raise KnotError("fourier knot needs at least one nonconstant harmonic")
    A = np.zeros((3, K + 1))
    B = np.zeros((3, K + 1))
    for i, (a_arr, b_arr) in enumerate(rows):
        A[i, : len(a_arr)] = a_arr
        B[i, : len(b_arr)] = b_arr
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise KnotError("non-finite coefficient")
    B[:, 0] = 0.0
    knot = Knot("fourier", a=A, b=B, name=name)
    _check_speed(knot)
    return knot


def circle_knot(radius: float = 1.0, name: str = "circle") -> Knot:
    if not radius > 0:
        raise KnotError("circle radius must be positive")
    A = np.zeros((3, 2))
    B = np.zeros((3, 2))
    A[0, 1] = radius
    B[1, 1] = radius
    return Knot("circle", a=A, b=B, params={"radius": float(radius)}, name=name)


def ellipse_knot(semi_a: float, semi_b: float, name: str = "ellipse") -> Knot:
    return fourier_knot([([0.0, semi_a], [0.0, 0.0]), ([0.0, 0.0], [0.0, semi_b]), ([0.0], [])], name=name)


def torus_knot(p: int, q: int, R: float, r: float, name: str = "") -> Knot:
    """((R + r cos qt) cos pt, (R + r cos qt) sin pt, r sin qt), exactly."""
    if int(p) != p or int(q) != q or p == 0 or q == 0:
        raise KnotError("torus knot needs nonzero integers p, q")
    p, q = int(p), int(q)
    if math.gcd(p, q) != 1:
        raise KnotError("torus knot needs coprime p, q (otherwise the curve is multiply covered)")
    if not (R > r > 0):
        raise KnotError("torus knot needs R > r > 0")
    K = abs(p) + abs(q)
    A = np.zeros((3, K + 1))
    B = np.zeros((3, K + 1))

    def add(row, k, ca, sb):
        # ca cos(kt) + sb sin(kt) for possibly negative k
        if k < 0:
            k, sb = -k, -sb
        A[row, k] += ca
        B[row, k] += sb

    add(0, p, R, 0.0)
    add(0, p + q, r / 2, 0.0)
    add(0, p - q, r / 2, 0.0)
    add(1, p, 0.0, R)
    add(1, p + q, 0.0, r / 2)
    add(1, p - q, 0.0, r / 2)
    add(2, q, 0.0, r)
    B[:, 0] = 0.0
    knot = Knot("torus", a=A, b=B, params={"p": p, "q": q, "R": float(R), "r": float(r)},
                name=name or f"torus({p},{q})")
    _check_speed(knot)
    return knot


def polygon_knot(vertices, name: str = "") -> Knot:
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise KnotError("polygon vertices must be a list of 3-vectors")
    if len(verts) < 3:
        raise KnotError("polygon needs at least 3 vertices")
    if not np.all(np.isfinite(verts)):
        raise KnotError("non-finite vertex coordinate")
    edges = np.roll(verts, -1, axis=0) - verts
    lengths = np.linalg.norm(edges, axis=1)
    if np.any(lengths <= 1e-12 * max(lengths.max(), 1.0)):
        raise KnotError("consecutive polygon vertices must be distinct")
    dirs = edges / lengths[:, None]
    # angle 0 at a vertex means the polygon folds back onto itself
    if np.any(np.einsum("ij,ij->i", dirs, np.roll(dirs, -1, axis=0)) < -1 + 1e-12):
        raise KnotError("polygon folds back along an edge")
    return Knot("polygon", vertices=verts, name=name)


def knot_from_samples(points, name: str = "") -> Knot:
    """Fourier knot interpolating equally spaced samples of a closed curve."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    X = np.fft.rfft(pts, axis=0) / n
    K = (n - 1) // 2
    A = np.zeros((3, K + 1))
    B = np.zeros((3, K + 1))
    A[:, 0] = X[0].real
    A[:, 1:] = 2 * X[1 : K + 1].real.T
    B[:, 1:] = -2 * X[1 : K + 1].imag.T
    knot = Knot("fourier", a=A, b=B, name=name)
    _check_speed(knot)
    return knot


def make_knot(desc: dict) -> Knot:
    """Validated :class:`Knot` from a knot-file dictionary."""
    if not isinstance(desc, dict) or "type" not in desc:
        raise KnotError("knot description needs a 'type' field")
    kind = desc["type"]
    name = str(desc.get("name", ""))
    try:
        if kind == "circle":
            return circle_knot(float(desc.get("radius", 1.0)), name=name or "circle")
        if kind == "torus":
            return torus_knot(desc["p"], desc["q"], float(desc["R"]), float(desc["r"]), name=name)
        if kind == "polygon":
            return polygon_knot(desc["vertices"], name=name)
        if kind == "fourier":
            coords = []
            for axis in "xyz":
                c = desc.get(axis, {}) or {}
                coords.append((c.get("a", [0.0]), c.get("b", [])))
            return fourier_knot(coords, name=name)
    except (KeyError, TypeError) as exc:
        raise KnotError(f"malformed {kind} knot description: {exc}") from exc
    raise KnotError(f"unknown knot type {kind!r}")


@dataclass(frozen=True, eq=False)
class ArcFrame:
    """Uniform arc-length samples of a smooth knot.

    ``derivs[d]`` holds the ``d``-th arc-length derivative at every sample
    (``derivs[0]`` are the positions).  ``coef`` is the real-FFT spectrum of
    the positions, used to evaluate the curve between samples.
    """

    length: float
    x: np.ndarray
    t: np.ndarray
    derivs: np.ndarray
    coef: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    dkappa: np.ndarray
    knot: Knot | None = None

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def order(self) -> int:
        return self.derivs.shape[0] - 1

    @property
    def points(self) -> np.ndarray:
        return self.derivs[0]

    @property
    def tangent(self) -> np.ndarray:
        return self.derivs[1]

    @property
    def weight(self) -> float:
        """Trapezoidal weight of every sample."""
        return self.length / self.n

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n // 2 + 1) / self.length

    def normal(self) -> np.ndarray:
        if np.any(self.kappa < KAPPA_MIN):
            raise CurvatureError("principal normal undefined where curvature vanishes")
        return self.derivs[2] / self.kappa[:, None]

    def chord(self, h) -> np.ndarray:
        """gamma(x_i + h) - gamma(x_i) for every sample and every offset.

        Evaluated from the spectrum with the factor e^{ikh} - 1 so that no
        cancellation occurs for small h.  Shape ``(len(h), n, 3)``.
        """
        h = np.atleast_1d(np.asarray(h, dtype=float))
        kh = np.outer(h, self.wavenumbers)
        factor = 2j * np.sin(kh / 2) * np.exp(0.5j * kh)
        return np.fft.irfft(factor[:, :, None] * self.coef[None], n=self.n, axis=1)

    def shifted(self, h) -> np.ndarray:
        """gamma(x_i + h), shape ``(len(h), n, 3)``."""
        return self.points[None] + self.chord(h)

    def interpolate(self, values, x) -> np.ndarray:
        """Trigonometric interpolant of per-sample ``values`` at positions ``x``."""
        vals = np.asarray(values, dtype=float)
        spec = np.fft.rfft(vals, axis=0) / self.n
        k = self.wavenumbers
        w = np.full(len(k), 2.0)
        w[0] = 1.0
        if self.n % 2 == 0:
            w[-1] = 1.0
        phase = np.exp(1j * np.outer(np.atleast_1d(x), k)) * w
        out = phase @ spec.reshape(len(k), -1)
        return out.real.reshape((-1,) + vals.shape[1:])


def _cumulative_length(knot: Knot, max_m: int = 1 << 16):
    """Speed spectrum fine enough to resolve |c'(t)| to roundoff."""
    m = max(1024, 32 * (knot.degree + 1))
    while True:
        t = 2 * np.pi * np.arange(m) / m
        v = knot.speed(t)
        spec = np.fft.rfft(v) / m
        tail = np.abs(spec[m // 4 :]).max()
        if tail < 1e-15 * abs(spec[0]) or m >= max_m:
            break
        m *= 2
    length = 2 * np.pi * spec[0].real
    return length, spec


def _arc_of_t(spec, length, t):
    """s(t) = integral_0^t |c'|, from the speed spectrum (vectorised)."""
    k = np.arange(1, len(spec))
    c = 2 * spec[1:]  # speed = c0 + Re sum c_k e^{ikt}
    ikt = np.outer(t, k)
    # integral of Re(c_k e^{ikt}) = Re(c_k (e^{ikt} - 1)/(ik))
    integ = ((np.exp(1j * ikt) - 1) * (c / (1j * k))).real.sum(axis=1)
    return length * t / (2 * np.pi) + integ


def resample_arclength(knot: Knot, N: int = 256, D: int = 10, tol: float = 1e-13,
                       filter_tol: float = 1e-15) -> ArcFrame:
    """Resample a smooth knot at N uniform arc-length nodes with D derivatives."""
    if not knot.smooth:
        raise ResampleError("arc-length resampling needs a smooth knot")
    # FFT-friendly sizes: multiples of 32 (powers of two and e.g. 96)
    if N < 64 or N % 32:
        raise ResampleError("N must be a multiple of 32 and at least 64")
    if D < 3:
        raise ResampleError("derivative order D must be at least 3")
    _check_speed(knot)
    length, spec = _cumulative_length(knot)
    x = length * np.arange(N) / N

    # seed by inverting a tabulated s(t) (monotone), then safeguarded Newton
    tt = np.linspace(0.0, 2 * np.pi, 4 * N + 1)
    st = _arc_of_t(spec, length, tt)
    t = np.interp(x, st, tt)
    idx = np.clip(np.searchsorted(st, x, side="right") - 1, 0, len(tt) - 2)
    lo, hi = tt[idx], tt[idx + 1]
    for _ in range(60):
        resid = _arc_of_t(spec, length, t) - x
        if np.max(np.abs(resid)) < tol * max(length, 1.0):
            break
        lo = np.where(resid < 0, t, lo)
        hi = np.where(resid > 0, t, hi)
        step = resid / knot.speed(t)
        t_new = t - step
        bad = (t_new < lo) | (t_new > hi)
        t = np.where(bad, 0.5 * (lo + hi), t_new)
    else:
        raise ResampleError("arc-length inversion did not converge")

    pts = knot.position(t)
    coef = np.fft.rfft(pts, axis=0)
    mag = np.abs(coef)
    coef = np.where(mag < filter_tol * mag.max(), 0.0, coef)
    if N % 2 == 0:
        coef[-1] = 0.0
    k = 2 * np.pi * np.arange(N // 2 + 1) / length
    derivs = np.empty((D + 1, N, 3))
    for d in range(D + 1):
        derivs[d] = np.fft.irfft(((1j * k) ** d)[:, None] * coef, n=N, axis=0)

    speed = np.linalg.norm(derivs[1], axis=1)
    if np.max(np.abs(speed - 1)) > 1e-9:
        raise ResampleError(f"unit-speed check failed (max dev {np.max(np.abs(speed - 1)):.2e}); increase N")
    ortho = np.einsum("ij,ij->i", derivs[1], derivs[2])
    if np.max(np.abs(ortho)) > 1e-8:
        raise ResampleError("gamma'.gamma'' check failed; increase N")

    kappa = np.linalg.norm(derivs[2], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.linalg.det(np.stack([derivs[1], derivs[2], derivs[3]], axis=1)) / kappa**2
        dkappa = np.einsum("ij,ij->i", derivs[2], derivs[3]) / kappa
    small = kappa < KAPPA_MIN
    tau = np.where(small, np.nan, tau)
    dkappa = np.where(small, np.nan, dkappa)
    return ArcFrame(length=float(length), x=x, t=t, derivs=derivs, coef=coef,
                    kappa=kappa, tau=tau, dkappa=dkappa, knot=knot)


def frenet(frame: ArcFrame, i: int):
    """(kappa, tau, kappa') at sample ``i``; tau and kappa' are None if kappa ~ 0."""
    if not 0 <= i < frame.n:
        raise IndexError(f"sample index {i} out of range")
    k = float(frame.kappa[i])
    if k < KAPPA_MIN:
        return k, None, None
    return k, float(frame.tau[i]), float(frame.dkappa[i])


def total_length(knot: Knot) -> float:
    if knot.kind == "polygon":
        edges = np.roll(knot.vertices, -1, axis=0) - knot.vertices
        return float(np.linalg.norm(edges, axis=1).sum())
    return float(_cumulative_length(knot)[0])
