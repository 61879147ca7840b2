"""Symbolic derivation of the residue densities in terms of kappa and tau.

The arc-length derivatives of gamma are expanded in the Frenet frame
(T' = kappa N, N' = -kappa T + tau B, B' = -tau N), the chord series and its
s/2 power are formed with the same recurrence used numerically in
:mod:`knotbeta.jets`, and the density 2 h_{2j}(-2j-1) is reduced modulo
total derivatives.  Results are cached; nothing here is hard-coded.
"""

from __future__ import annotations

from functools import lru_cache

import sympy as sp

from .jets import power_coefficients

_MAX_D = 12
K = sp.symbols(f"k0:{_MAX_D + 1}")  # kappa and its derivatives
T = sp.symbols(f"t0:{_MAX_D + 1}")  # tau and its derivatives
S = sp.Symbol("s")


def _dx(expr):
    """Total x-derivative of a polynomial in the K and T symbols."""
    out = 0
    for syms in (K, T):
        for n in range(_MAX_D):
            out += sp.diff(expr, syms[n]) * syms[n + 1]
    return sp.expand(out)


def _dvec(v):
    cT, cN, cB = v
    k, t = K[0], T[0]
    return (
        sp.expand(_dx(cT) - cN * k),
        sp.expand(_dx(cN) + cT * k - cB * t),
        sp.expand(_dx(cB) + cN * t),
    )


@lru_cache(maxsize=None)
def frenet_derivatives(n: int):
    """Frenet components (T, N, B) of gamma^(1..n)."""
    vecs = [None, (sp.Integer(1), sp.Integer(0), sp.Integer(0))]
    for _ in range(2, n + 1):
        vecs.append(_dvec(vecs[-1]))
    return vecs


def _dot(u, v):
    return sp.expand(sum(a * b for a, b in zip(u, v)))


@lru_cache(maxsize=None)
def chord_coefficients(r: int):
    """f_1..f_r of G(h) as polynomials in the Frenet symbols."""
    g = frenet_derivatives(r + 1)
    f = [sp.Integer(1)]
    for m in range(1, r + 1):
        f.append(sp.expand(sum(
            _dot(g[p], g[m + 2 - p]) / (sp.factorial(p) * sp.factorial(m + 2 - p))
            for p in range(1, m + 2)
        )))
    return tuple(f)


def _order(sym):
    name = sym.name
    return name[0], int(name[1:])


def reduce_total_derivatives(expr):
    """Integrate by parts until no derivative of order >= 2 appears linearly.

    A monomial B * u_{n-1}^a * u_n with u_n the highest derivative present is
    replaced by -(B' u_{n-1}^(a+1))/(a+1), which differs by a total
    derivative and has lower maximal order.
    """
    expr = sp.expand(expr)
    for _ in range(200):
        changed = False
        out = 0
        for term in sp.Add.make_args(expr):
            syms = [x for x in term.free_symbols if x.name[0] in "kt"]
            if not syms:
                out += term
                continue
            top = max(syms, key=lambda x: _order(x)[1])
            kind, n = _order(top)
            if n >= 2 and sp.degree(term, top) == 1:
                prev = (K if kind == "k" else T)[n - 1]
                rest = sp.expand(term / top)
                a = sp.degree(rest, prev)
                base = sp.expand(rest / prev**a)
                out += -_dx(base) * prev ** (a + 1) / (a + 1)
                changed = True
            else:
                out += term
        expr = sp.expand(out)
        if not changed:
            return expr
    raise RuntimeError("total-derivative reduction did not terminate")


@lru_cache(maxsize=None)
def residue_density(j: int):
    """2 h_{2j}(s=-2j-1) as a polynomial in kappa, tau and derivatives."""
    f = chord_coefficients(2 * j)
    h = power_coefficients(list(f), S / 2, sp.Integer(1))
    return sp.expand(2 * h[2 * j].subs(S, -2 * j - 1))


@lru_cache(maxsize=None)
def residue_polynomial(j: int) -> dict:
    """Residue at s=-2j-1 as {(kappa, kappa', tau) exponents: coefficient}.

    Valid for the orders where the reduced density involves only kappa,
    kappa' and tau (checked); raises otherwise.
    """
    reduced = reduce_total_derivatives(residue_density(j))
    if reduced.free_symbols - {K[0], K[1], T[0]}:
        raise NotImplementedError(f"residue at j={j} does not reduce to kappa, kappa', tau")
    poly = sp.Poly(reduced, K[0], K[1], T[0])
    return {monom: sp.Rational(coeff) for monom, coeff in poly.terms()}
