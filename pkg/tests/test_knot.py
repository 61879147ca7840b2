import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation
from scipy.special import ellipe

from knotbeta.errors import KnotError, ResampleError
from knotbeta.knot import (
    circle_knot,
    ellipse_knot,
    fourier_knot,
    frenet,
    make_knot,
    polygon_knot,
    resample_arclength,
    torus_knot,
    total_length,
)
from knotbeta.oracles import adaptive_length, parametric_frenet


def test_unit_circle_length():
    frame = resample_arclength(circle_knot(1.0), 128)
    assert abs(frame.length - 2 * np.pi) <= 1e-10


def test_circle_radius_two_curvature_and_torsion():
    frame = resample_arclength(circle_knot(2.0), 128)
    assert np.allclose(frame.kappa, 0.5, atol=1e-10)
    assert np.allclose(frame.tau, 0.0, atol=1e-8)


def test_torus_length_matches_adaptive_quadrature(torus, trefoil_knot):
    assert abs(torus.length - adaptive_length(trefoil_knot)) <= 1e-8


def test_ellipse_length_matches_complete_elliptic_integral(ellipse):
    a, b = 1.3, 0.8
    exact = 4 * a * ellipe(1 - (b / a) ** 2)
    assert abs(ellipse.length - exact) <= 1e-10


def test_arc_length_frame_invariants(torus):
    t1 = torus.derivs[1]
    t2 = torus.derivs[2]
    assert np.max(np.abs(np.linalg.norm(t1, axis=1) - 1)) <= 1e-9
    assert np.max(np.abs(np.einsum("ij,ij->i", t1, t2))) <= 1e-8
    assert np.array_equal(torus.kappa, np.linalg.norm(t2, axis=1))


def test_frenet_unit_circle():
    frame = resample_arclength(circle_knot(1.0), 64)
    k, tau, dk = frenet(frame, 0)
    assert k == pytest.approx(1.0, abs=1e-10)
    assert tau == pytest.approx(0.0, abs=1e-8)
    assert dk == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("radius", [0.5, 3.0])
def test_frenet_circle_radius(radius):
    frame = resample_arclength(circle_knot(radius), 64)
    k, tau, dk = frenet(frame, 5)
    assert k == pytest.approx(1 / radius, abs=1e-9)
    assert abs(tau) <= 1e-8 and abs(dk) <= 1e-8


def test_frenet_torus_matches_parametric_formulas(torus, trefoil_knot):
    k, tau, _ = frenet(torus, 0)
    k_ref, tau_ref = parametric_frenet(trefoil_knot, 0.0)
    assert abs(k - k_ref) <= 1e-6
    assert abs(tau - tau_ref) <= 1e-6


def test_frenet_along_the_torus_matches_parametric_formulas(torus, trefoil_knot):
    for i in (7, 50, 133):
        k, tau, _ = frenet(torus, i)
        k_ref, tau_ref = parametric_frenet(trefoil_knot, torus.t[i])
        assert abs(k - k_ref) <= 1e-6 and abs(tau - tau_ref) <= 1e-6


def test_frenet_index_out_of_range(circle):
    with pytest.raises(IndexError):
        frenet(circle, circle.n)


def test_make_knot_presets():
    circle = make_knot({"type": "fourier", "x": {"a": [0, 1]}, "y": {"a": [0, 0], "b": [0, 1]}})
    assert total_length(circle) == pytest.approx(2 * np.pi, abs=1e-12)
    torus = make_knot({"type": "torus", "p": 2, "q": 3, "R": 2, "r": 0.5})
    assert torus.kind == "torus" and torus.params["p"] == 2
    square = make_knot({"type": "polygon", "vertices": [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]})
    assert total_length(square) == pytest.approx(4.0)


@pytest.mark.parametrize(
    "desc",
    [
        {"type": "polygon", "vertices": [[0, 0, 0], [1, 0, 0]]},
        {"type": "torus", "p": 2, "q": 3, "R": 0.5, "r": 0.5},
        {"type": "torus", "p": 2, "q": 4, "R": 2, "r": 0.5},
        {"type": "torus", "p": 2, "q": 3},
        {"type": "circle", "radius": -1},
        {"type": "spline"},
        {"name": "no type"},
        {"type": "fourier", "x": {"a": [0, 1]}, "y": {"a": [0, 1]}},
    ],
)
def test_make_knot_rejects_invalid_descriptions(desc):
    with pytest.raises(KnotError):
        make_knot(desc)


def test_polygon_rejects_repeated_and_folded_vertices():
    with pytest.raises(KnotError):
        polygon_knot([[0, 0, 0], [0, 0, 0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(KnotError):
        polygon_knot([[0, 0, 0], [1, 0, 0], [0.5, 0, 0], [0, 1, 0]])


@pytest.mark.parametrize("n", [48, 100, 32])
def test_resample_rejects_bad_sample_counts(n):
    with pytest.raises(ResampleError):
        resample_arclength(circle_knot(), n)


def test_resample_rejects_polygons():
    with pytest.raises(ResampleError):
        resample_arclength(polygon_knot([[0, 0, 0], [1, 0, 0], [0, 1, 0]]), 64)


def test_refinement_stability(trefoil_knot, torus):
    finer = resample_arclength(trefoil_knot, 512)
    assert abs(finer.length - torus.length) <= 1e-10


def test_scaling_law(trefoil_knot, torus):
    lam = 2.5
    scaled = resample_arclength(trefoil_knot.transformed(scale=lam), 256)
    assert abs(scaled.length - lam * torus.length) <= 1e-8
    assert np.max(np.abs(scaled.kappa - torus.kappa / lam)) <= 1e-8
    assert np.max(np.abs(scaled.tau - torus.tau / lam)) <= 1e-8


def test_rephasing_gives_cyclic_shift_of_invariants(trefoil_knot):
    torus = resample_arclength(trefoil_knot, 512)
    moved = resample_arclength(trefoil_knot.rephased(0.7), 512)
    assert abs(moved.length - torus.length) <= 1e-8
    # compare the sorted samples through interpolation at a common arc offset
    k_shift = torus.interpolate(torus.kappa, (moved.x + _arc_offset(torus, moved)) % torus.length)
    assert np.max(np.abs(k_shift - moved.kappa)) <= 1e-8


def _arc_offset(reference, moved):
    # the arc position on ``reference`` of ``moved``'s base point
    p0 = moved.points[0]
    i = int(np.argmin(np.linalg.norm(reference.points - p0, axis=1)))
    x = reference.x[i]
    for _ in range(20):
        d = reference.interpolate(reference.points, np.array([x]))[0] - p0
        t = reference.interpolate(reference.tangent, np.array([x]))[0]
        x -= d @ t
    return x


@settings(max_examples=8, deadline=None)
@given(
    quat=st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda q: np.linalg.norm(q) > 0.1),
    shift=st.lists(st.floats(-5, 5), min_size=3, max_size=3),
)
def test_rigid_motion_invariance(quat, shift):
    base = fourier_knot([([0, 1, 0.1], [0, 0.1]), ([0, 0, 0.05], [1, 0.1]), ([0, 0.1], [0, 0.2])])
    rot = Rotation.from_quat(quat).as_matrix()
    f0 = resample_arclength(base, 256)
    f1 = resample_arclength(base.transformed(rotation=rot, shift=shift), 256)
    assert abs(f0.length - f1.length) <= 1e-8
    assert np.max(np.abs(f0.kappa - f1.kappa)) <= 1e-8
    assert np.max(np.abs(np.abs(f0.tau) - np.abs(f1.tau))) <= 1e-8
