import math

import numpy as np
import pytest

from oscidyn.classify import Verdict, classify_tn, classify_tp
from oscidyn.generators import gaussian_kernel_tp
from oscidyn.lineintegral import (CertKind, GridMatFn, NonConvergentError, QuadConfig,
                                  F_segment, checkerboard_certificate, closed_form_F,
                                  direct_certificate, divided_difference, envelope_bounds,
                                  envelope_certificate, envelope_checkerboard_certificate,
                                  example2, example7_family, hankel_certificate, integrate,
                                  max_tp_radius, perturbation_bounds, variational_matrix)
from oscidyn.models import chain_matrix, tanh_network
from oscidyn.signvar import checkerboard_leq, d_pm

E13 = np.zeros((3, 3))
E13[0, 2] = 1.0


def sech2(y):
    return 1.0 / math.cosh(y) ** 2


def test_tp_family_integral_not_tn():
    val = integrate(example2)
    np.testing.assert_allclose(val, [[1.01, 1.5], [math.log(2), 1.0]], atol=1e-10, rtol=0)
    assert classify_tn(val).verdict is Verdict.NO
    assert np.linalg.det(val) < 0
    for t in np.linspace(0, 1, 11):
        assert classify_tp(example2(t)).verdict is Verdict.YES


def test_polynomial_exactness_and_simpson():
    fn = lambda t: np.array([[t ** 9, 1.0], [t ** 3, t]])
    np.testing.assert_allclose(integrate(fn), [[0.1, 1.0], [0.25, 0.5]], atol=1e-14)
    simpson = integrate(fn, QuadConfig(rule="simpson", refine_tol=1e-9, max_panels=1 << 14))
    np.testing.assert_allclose(simpson, [[0.1, 1.0], [0.25, 0.5]], atol=1e-9)


def test_nonconvergence_reports_both_estimates():
    fn = lambda t: np.array([[math.sqrt(abs(t - 1 / 3))]])
    with pytest.raises(NonConvergentError) as info:
        integrate(fn, QuadConfig(max_panels=16, refine_tol=1e-14))
    assert info.value.previous is not None and info.value.last is not None
    assert not np.array_equal(info.value.previous, info.value.last)


def test_quadconfig_validation():
    with pytest.raises(ValueError):
        QuadConfig(rule="trapezoid")
    with pytest.raises(ValueError):
        QuadConfig(initial_panels=8, max_panels=4)


def test_grid_function_breakpoints():
    mats = [np.eye(2), 3 * np.eye(2), np.eye(2)]
    fn = GridMatFn([0.0, 0.5, 1.0], mats)
    np.testing.assert_allclose(fn(0.25), 2 * np.eye(2))
    assert fn.breakpoints == (0.5,)
    np.testing.assert_allclose(integrate(fn), 2 * np.eye(2), atol=1e-14)
    with pytest.raises(ValueError):
        GridMatFn([0.0, 0.6], mats[:2])


def test_divided_difference():
    assert divided_difference(math.tanh, sech2, 1.0, 2.0) == pytest.approx(0.20243342412005205,
                                                                           rel=1e-14)
    a = 0.7
    near = divided_difference(math.tanh, sech2, a, a + 1e-9)
    assert near == pytest.approx(sech2(a), rel=1e-9)


def test_closed_form_matches_quadrature(rng):
    sys_ = tanh_network()
    form = sys_.scalar_form
    for _ in range(25):
        k = int(rng.integers(12))
        a, b = sys_.sample(rng), sys_.sample(rng)
        closed = closed_form_F(form.C(k), form.fs, form.dfs, a, b)
        quad = F_segment(sys_.jacobian, k, a, b)
        assert np.max(np.abs(closed - quad)) <= 1e-10 * max(1.0, np.max(np.abs(quad)))
        g = np.array([divided_difference(math.tanh, sech2, x, y) for x, y in zip(a, b)])
        np.testing.assert_allclose(closed, form.C(k) @ np.diag(g), rtol=1e-15)


def test_variational_identity(rng):
    sys_ = tanh_network()
    for _ in range(10):
        k = int(rng.integers(12))
        a, b = sys_.sample(rng), sys_.sample(rng)
        M = variational_matrix(sys_, k, a, b)
        np.testing.assert_allclose(sys_.f(k, b) - sys_.f(k, a), M @ (b - a), atol=1e-12)
    J = F_segment(sys_.jacobian, 0, a, a)
    np.testing.assert_array_equal(J, sys_.jacobian(0, a))


def test_checkerboard_certificate_rejects_tp_family():
    G, H = np.eye(2), 2 * np.eye(2)
    cert = checkerboard_certificate(example2, G, H, 1e-3)
    assert cert.verdict is Verdict.NO and cert.kind is CertKind.CHECKERBOARD
    assert set(cert.evidence) >= {"t", "i", "j", "value"}
    with pytest.raises(ValueError):
        checkerboard_certificate(example2, [[1, 2], [3, 4]], H, 1e-3)
    assert envelope_checkerboard_certificate(example2).verdict is Verdict.NO


def test_envelope_bounds_order():
    P, Q = envelope_bounds(example2, 33)
    for t in np.linspace(0, 1, 33):
        assert checkerboard_leq(P, example2(t)) and checkerboard_leq(example2(t), Q)
    assert envelope_certificate(example2).verdict is Verdict.NO


def test_perturbation_radius():
    A = np.array([[1.0, 0.1], [9.0, 1.0]])
    P, Q = perturbation_bounds(A, np.ones((2, 2)), 0.01)
    assert np.linalg.det(P) == pytest.approx(0.1 - 11.1 * 0.01)
    assert max_tp_radius(A, np.ones((2, 2))) == pytest.approx(1 / 111, abs=1e-7)
    w = max_tp_radius(chain_matrix(), E13)
    assert w == pytest.approx(0.65 * math.exp(-4), abs=1e-7)
    assert 0.0118 < w < 0.0125
    assert max_tp_radius(A, np.zeros((2, 2))) == math.inf
    with pytest.raises(ValueError):
        max_tp_radius([[1, 2], [3, 4]], np.ones((2, 2)))
    with pytest.raises(ValueError):
        perturbation_bounds(A, -np.ones((2, 2)), 0.1)


def test_chain_family_certificate():
    assert envelope_checkerboard_certificate(example7_family(0.01)).verdict is Verdict.YES
    assert envelope_checkerboard_certificate(example7_family(0.02)).verdict is Verdict.NO
    assert classify_tp(integrate(example7_family(0.011))).verdict is Verdict.YES


def test_bounded_family_certificate_is_sound(rng):
    for _ in range(10):
        N = gaussian_kernel_tp(3, rng)
        E = np.ones((3, 3))
        w = max_tp_radius(N, E)
        v, delta = 0.8 * w, 0.05 * w
        G, H = perturbation_bounds(N, E, v)
        D = d_pm(3)
        phase = rng.random((3, 3)) * 2 * np.pi
        fn = lambda t, ph=phase: N + D @ ((v - 2 * delta) * np.sin(2 * np.pi * t + ph)) @ D
        cert = checkerboard_certificate(fn, G, H, delta, grid=65)
        assert cert.verdict is Verdict.YES
        assert classify_tp(integrate(fn)).verdict is Verdict.YES


def test_hankel_certificate():
    def moments(t):
        atoms = np.array([0.5 + t, 1.2 + t, 2.0])
        w = np.array([1.0, 0.7 + t, 0.5])
        m = [np.sum(w * atoms ** j) for j in range(5)]
        return np.array([[m[i + j] for j in range(3)] for i in range(3)])
    cert = hankel_certificate(moments, grid=17)
    assert cert.verdict is Verdict.YES
    assert cert.evidence["integral_TP"]["verdict"] == "yes"
    assert hankel_certificate(example2, grid=5).verdict is Verdict.NO


def test_direct_certificate():
    cert = direct_certificate(example2)
    assert cert.verdict is Verdict.NO and not cert.sampled
    assert cert.to_dict()["kind"] == "DirectQuadrature"
