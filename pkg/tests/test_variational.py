import math

import numpy as np
import pytest

from knotbeta.continuation import ContinuationConfig, beta_direct
from knotbeta.errors import ConfigError
from knotbeta.knot import knot_from_samples, resample_arclength
from knotbeta.special import circle_beta_value
from knotbeta.variational import (
    bernstein_apply,
    bracket_length_commutation,
    discrete_hessian_contraction,
    first_variation_check,
    gelfand_shilov_check,
    gradient_field,
    kernel_hessian,
    kernel_poles,
    length_bracket,
    poisson_bracket,
    vector_kernel,
)


def parametric_vector_kernel(knot, frame, s, m=1024):
    """int |Delta|^(s-2) Delta dy by the periodic trapezoid on the raw parameter.

    For even s >= 2 the integrand is a trigonometric polynomial, so the rule is
    exact up to roundoff.
    """
    t = 2 * np.pi * np.arange(m) / m
    c = knot.position(t)
    v = knot.speed(t) * (2 * np.pi / m)
    D = frame.points[:, None, :] - c[None, :, :]
    r2 = np.sum(D**2, axis=-1)
    return np.einsum("nm,m,nmk->nk", r2 ** ((s - 2) / 2), v, D)


@pytest.mark.parametrize("s", [2.0, 0.5, -0.5, -1.5, -2.5, -3.7, -4.5])
def test_vector_kernel_circle(circle, s):
    A = vector_kernel(circle, s).real
    expected = circle_beta_value(s) / (4 * math.pi) * circle.points
    assert np.max(np.abs(A - expected)) <= 1e-8 * max(1.0, np.max(np.abs(expected)))


@pytest.mark.parametrize("s", [2.0, 4.0, 6.0])
def test_vector_kernel_torus_matches_parametric_quadrature(torus, trefoil_knot, s):
    A = vector_kernel(torus, s).real
    ref = parametric_vector_kernel(trefoil_knot, torus, s)
    assert np.max(np.abs(A - ref)) <= 1e-10 * np.max(np.abs(ref))


def test_vector_kernel_poles(circle):
    assert kernel_poles(0.0, -2, 8) == [-1.0, -3.0, -5.0, -7.0]
    assert kernel_poles(0.0, -1, 8) == [-2.0, -4.0, -6.0, -8.0]
    with pytest.raises(ValueError):
        vector_kernel(circle, -1.0)


def test_gradient_circle_is_radial_with_magnitude_8pi(circle):
    g = gradient_field(circle, 2.0)
    mag = g.magnitude()
    assert np.max(np.abs(mag - 8 * math.pi)) <= 1e-6
    assert np.max(mag) - np.min(mag) <= 1e-8
    radial = np.einsum("nk,nk->n", g.values, circle.points) / mag
    assert np.max(np.abs(radial - 1)) <= 1e-12


def test_gradient_circle_equivariance(circle):
    g = gradient_field(circle, 3.0).values
    # rotating the sample index by k rotates the field by the matching angle
    k = 37
    angle = circle.x[k]
    rot = np.array([[math.cos(angle), -math.sin(angle), 0], [math.sin(angle), math.cos(angle), 0], [0, 0, 1]])
    assert np.max(np.abs(np.roll(g, -k, axis=0) - g @ rot.T)) <= 1e-8


def test_gradient_of_planar_knot_stays_in_plane(ellipse):
    g = gradient_field(ellipse, 2.5).values
    assert np.max(np.abs(g[:, 2])) <= 1e-8


def test_gradient_requires_s_above_one(circle):
    with pytest.raises(ConfigError):
        gradient_field(circle, 1.0)
    with pytest.raises(ConfigError):
        gradient_field(circle, 2.0, convention="other")


def test_first_variation_circle_normal_bump(circle):
    check = first_variation_check(circle, 2.0)
    assert check.relative_error <= 1e-3


@pytest.mark.parametrize("s", [2.0, 3.5])
def test_first_variation_torus_normal_bump(torus, s):
    assert first_variation_check(torus, s).relative_error <= 1e-3


def test_first_variation_of_dilation_has_correct_sign(circle):
    # B(lambda K) = lambda^(s+2) B(K), so moving along gamma changes B at rate (s+2) B
    s = 2.0
    check = first_variation_check(circle, s, delta=circle.points)
    expected = (s + 2) * circle_beta_value(s)
    assert check.predicted == pytest.approx(expected, rel=1e-8)
    assert check.finite_difference == pytest.approx(expected, rel=1e-6)


def test_printed_convention_gradient_differs(circle):
    derived = gradient_field(circle, 3.0).values
    printed = gradient_field(circle, 3.0, convention="printed").values
    assert np.max(np.abs(derived - printed)) > 1.0


def test_bracket_antisymmetry(asym):
    for s, u in ((2.0, 4.0), (-1.5, 3.0), (0.5, -0.5)):
        a = poisson_bracket(asym, s, u)
        b = poisson_bracket(asym, u, s)
        assert abs(a + b) <= 1e-8 * max(1.0, abs(a))
    assert abs(poisson_bracket(asym, 2.0, 2.0)) <= 1e-8


def test_bracket_is_generically_nonzero(asym):
    assert abs(poisson_bracket(asym, 2.0, 4.0)) > 1.0


def test_bracket_kernel_matches_triple_sum(asym):
    for s, u in ((2.0, 4.0), (3.0, 5.0)):
        a = poisson_bracket(asym, s, u, method="kernel")
        b = poisson_bracket(asym, s, u, method="triple")
        assert abs(a - b) <= 1e-6 * abs(a)


def test_bracket_kernel_matches_gradient_contraction(asym):
    a = poisson_bracket(asym, 2.0, 4.0)
    b = poisson_bracket(asym, 2.0, 4.0, method="gradient")
    assert abs(a - b) <= 1e-9 * abs(a)


def test_printed_formulas_disagree_in_sign(asym):
    # printed gradient -2s A contracted through -l^-2 int det gives -4su,
    # while the printed triple integral carries +4su
    a = poisson_bracket(asym, 2.0, 4.0, convention="printed")
    b = poisson_bracket(asym, 2.0, 4.0, method="gradient", convention="printed")
    assert abs(a + b) <= 1e-9 * abs(a)


@pytest.mark.parametrize("s, u", [(2.0, 4.0), (-1.0 + 0.3, 3.0), (-0.5, 1.5)])
def test_bracket_vanishes_on_planar_knots(ellipse, circle, s, u):
    for frame in (ellipse, circle):
        assert abs(poisson_bracket(frame, s, u)) <= 1e-8


def test_bracket_scales_as_su(asym):
    cfg = ContinuationConfig()
    a = poisson_bracket(asym, 2.0, 4.0, cfg=cfg)
    As, Au = vector_kernel(asym, 2.0, cfg=cfg), vector_kernel(asym, 4.0, cfg=cfg)
    det = np.einsum("nk,nk->n", asym.tangent, np.cross(As, Au)).real
    kernel_only = asym.weight * det.sum() / asym.length**2
    assert a == pytest.approx(-4 * 2.0 * 4.0 * kernel_only, rel=1e-12)


def test_bracket_domain_and_method_checks(circle):
    with pytest.raises(ConfigError):
        poisson_bracket(circle, -2.0, 1.0)
    with pytest.raises(ConfigError):
        poisson_bracket(circle, 1.0, 2.0, method="nope")


def test_torus_bracket_bounded_across_minus_one(torus96):
    values = [poisson_bracket(torus96, s, 4.0) for s in (-1.05, -0.95)]
    assert all(np.isfinite(values))
    assert abs(values[0] - values[1]) <= 1e-3


def test_torus_bracket_residue_at_minus_one(torus96):
    assert abs(bracket_length_commutation(torus96, 4.0)) <= 1e-3


def test_bracket_length_commutation_planar_cases(ellipse, circle):
    assert abs(bracket_length_commutation(ellipse, 3.0)) <= 1e-12
    assert abs(bracket_length_commutation(circle, 2.0)) <= 1e-8


def test_length_bracket_matches_finite_difference(asym):
    """{l, B_u} = l^-2 d/dt B_u(K + t kappa B); the arc measure does not move."""
    u, step = 4.0, 1e-4
    binormal = np.cross(asym.tangent, asym.normal())
    delta = asym.kappa[:, None] * binormal
    values = []
    for t in (step, -step):
        knot = knot_from_samples(asym.points + t * delta)
        values.append(beta_direct(resample_arclength(knot, 2 * asym.n), u).real)
    fd = (values[0] - values[1]) / (2 * step) / asym.length**2
    assert length_bracket(asym, u) == pytest.approx(fd, rel=1e-6)


def test_bracket_residue_at_minus_one_is_minus_twice_length_bracket(asym):
    """The residue in s at -1 of the derived bracket equals -2 {l, B_u}.

    On a knot without extra symmetry {l, B_u} is not zero, so the bracket
    does have a pole at s = -1 there.
    """
    u = 4.0
    residue = bracket_length_commutation(asym, u)
    lb = length_bracket(asym, u)
    assert abs(lb) > 0.1
    assert residue == pytest.approx(-2 * lb, rel=1e-3)


def test_printed_convention_is_regular_at_minus_one(asym):
    """With the printed exponent the kernel's poles sit at even s, so the
    (s+1)-weighted estimate is only the O(delta^2) Taylor remainder."""
    a = bracket_length_commutation(asym, 4.0, delta=1e-2, convention="printed")
    b = bracket_length_commutation(asym, 4.0, delta=5e-3, convention="printed")
    assert abs(b) <= abs(a) / 3
    assert abs(a) <= 1e-2


@pytest.mark.parametrize("s, expected", [(3.0, 96 * math.pi), (4.0, 96 * math.pi**2)])
def test_bernstein_circle(circle, s, expected):
    res = bernstein_apply(circle, s)
    assert res.lhs == pytest.approx(expected, abs=1e-6)
    assert res.rhs == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("s", [3.0, 4.0, 6.0])
def test_bernstein_identity_on_smooth_knots(circle, ellipse, torus, s):
    for frame in (circle, ellipse, torus):
        assert bernstein_apply(frame, s).relative_error <= 1e-5


def test_bernstein_requires_s_above_two(circle):
    with pytest.raises(ConfigError):
        bernstein_apply(circle, 2.0)


def test_kernel_hessian_matches_finite_differences(rng):
    for _ in range(5):
        v = rng.normal(size=3)
        s = rng.uniform(0.5, 5)
        h = 1e-4
        f = lambda x: np.linalg.norm(x) ** s
        fd = np.empty((3, 3))
        for i in range(3):
            for j in range(3):
                ei, ej = np.eye(3)[i] * h, np.eye(3)[j] * h
                fd[i, j] = (f(v + ei + ej) - f(v + ei - ej) - f(v - ei + ej) + f(v - ei - ej)) / (4 * h * h)
        assert np.max(np.abs(kernel_hessian(v, s) - fd)) <= 1e-6 * max(1.0, np.max(np.abs(fd)))


@pytest.mark.parametrize("s", [3.0, 4.0, 5.5])
def test_discrete_hessian_contraction(torus, rng, s):
    for _ in range(5):
        i, j = rng.choice(torus.n, size=2, replace=False)
        fd, exact = discrete_hessian_contraction(torus.points, torus.weight, int(i), int(j), s)
        assert abs(fd - exact) <= 1e-5 * abs(exact)


@pytest.mark.parametrize("n, z, s, rhs", [
    (3, [1.0, 0.0, 0.0], 2.0, 5.0),
    (1, [2.0], 1.0, 0.5),
    (3, [0.3, -1.2, 0.7], 0.0, 0.0),
    (3, [0.3, -1.2, 0.7], 2.5, None),
])
def test_gelfand_shilov(n, z, s, rhs):
    lhs, computed = gelfand_shilov_check(n, z, s)
    if rhs is not None:
        assert computed == pytest.approx(rhs, abs=1e-12)
    assert abs(lhs - computed) <= 1e-6 * max(1.0, abs(computed))


def test_gelfand_shilov_input_checks():
    with pytest.raises(ValueError):
        gelfand_shilov_check(2, [1.0, 0.0, 0.0], 1.0)
    with pytest.raises(ValueError):
        gelfand_shilov_check(2, [0.0, 0.0], 1.0)
