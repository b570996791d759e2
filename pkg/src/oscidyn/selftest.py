"""Golden-value table plus a seeded randomized property subset."""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._config import make_rng
from .classify import (SSR, Verdict, classify_oscillatory, classify_tn, classify_tp,
                       contiguous_minors_tp, is_hankel, ssr_order, tridiagonal_dominance_tn)
from .generators import bidiagonal_tn, gaussian_kernel_tp
from .lineintegral import (envelope_checkerboard_certificate, example2, example7_family,
                           hankel_certificate, integrate, max_tp_radius)
from .matrix import DEFAULT_TOL, cauchy_binet_minor, matpow, minor, submatrix
from .models import chain_matrix, euler_linear, linear_tv, phosphorelay, tanh_network
from .signvar import (Orientation, d_pm, in_V, orientation_lemma_check, s_minus, s_plus,
                      sample_low_variation, vdp_tn_check, vdp_tp_check)

OSC3 = np.array([[0.2, 0.1, 0.0], [9.0, 11.0, 1.0], [0.0, 1.0, 3.0]])
OSC3_SQUARED = np.array([[0.94, 1.12, 0.1], [100.8, 122.9, 14.0], [9.0, 14.0, 10.0]])
SMALL_TP = np.array([[1.0, 0.1], [9.0, 1.0]])
NOT_TN = np.array([[2.0, 9.1], [9.1, 2.0]])
M1234 = np.array([[1.0, 2.0], [3.0, 4.0]])
YES = Verdict.YES


def _osc3_oscillatory(tol):
    d = classify_oscillatory(OSC3, tol)
    return d.verdict is YES and d.exponent == 2


def _euler_family(tol):
    tri = np.eye(3, k=1) + np.eye(3, k=-1)
    ok = all(classify_oscillatory(np.eye(3) + e * tri, tol).verdict is YES for e in (0.1, 0.3, 0.5))
    return ok and classify_oscillatory(np.eye(3) + tri / math.sqrt(2), tol).verdict is Verdict.NO


def _orientation_example(tol):
    P = np.array([[1.0, 2.0], [3.0, 8.0]])
    rng = make_rng(7)
    for _ in range(200):
        d1 = -0.1 - rng.random()
        d2 = d1 * (3 / 8 + (1 / 8) * (0.05 + 0.9 * rng.random()))
        x = rng.random(2)
        if orientation_lemma_check(P, x, x - np.array([d1, d2]), tol) is not Orientation.HOLDS:
            return False
    return True


def _fig_period(build, x0, u, expect, steps):
    from .dynamics import detect_period, simulate
    rep = detect_period(simulate(build(), x0, steps), u)
    return rep.detected_period == expect and rep.residual < 1e-6


def _odts(build, h, tol, trials=20):
    from .dynamics import certify_odts_order
    return certify_odts_order(build(), h, trials=trials, tol=tol, rng=make_rng(0)).verdict is YES


def _invariance(build):
    from .dynamics import invariant_set_probe
    return invariant_set_probe(build(), 2000, rng=make_rng(0)).exits == 0


def _eigen(tol):
    from .reproduce import euler_eigen_check
    return euler_eigen_check(0.3)[1] < 1e-8


def _edist(tol):
    from .dynamics import lemma_edist_epsilon
    rep = lemma_edist_epsilon(euler_linear({"eps": 0.3}), tol=tol)
    return rep.ok and rep.eps_max < 1 / math.sqrt(2)


GOLDEN = [
    ("submatrix of osc3", lambda tol: np.array_equal(submatrix(OSC3, [1, 2], [1, 2]),
                                                    [[0.2, 0.1], [9.0, 11.0]])),
    ("det [[1,.1],[9,1]] = 0.1", lambda tol: abs(minor(SMALL_TP, [1, 2], [1, 2]) - 0.1) < 1e-12),
    ("det of non-TN symmetric < 0", lambda tol: minor(NOT_TN, [1, 2], [1, 2]) < 0),
    ("osc3 squared", lambda tol: np.allclose(matpow(OSC3, 2), OSC3_SQUARED, atol=1e-12, rtol=0)),
    ("[[1,2],[3,4]] not TP", lambda tol: classify_tp(M1234, tol).verdict is Verdict.NO),
    ("small TP example", lambda tol: classify_tp(SMALL_TP, tol).verdict is YES),
    ("osc3 TN", lambda tol: classify_tn(OSC3, tol).verdict is YES),
    ("osc3 not TP", lambda tol: classify_tp(OSC3, tol).verdict is Verdict.NO),
    ("non-TN symmetric", lambda tol: classify_tn(NOT_TN, tol).verdict is Verdict.NO),
    ("SSR orders of [[1,2],[3,4]]", lambda tol: ssr_order(M1234, 1, tol) is SSR.ALL_POSITIVE
     and ssr_order(M1234, 2, tol) is SSR.ALL_NEGATIVE),
    ("osc3 oscillatory, exponent 2", _osc3_oscillatory),
    ("small TP oscillatory, exponent 1",
     lambda tol: classify_oscillatory(SMALL_TP, tol).exponent == 1),
    ("osc3 row dominance", lambda tol: tridiagonal_dominance_tn(OSC3, tol)),
    ("Euler tridiagonal dominance", lambda tol: tridiagonal_dominance_tn(
        np.eye(3) + 0.5 * (np.eye(3, k=1) + np.eye(3, k=-1)), tol)),
    ("contiguous minors", lambda tol: contiguous_minors_tp(SMALL_TP, tol).verdict is YES
     and contiguous_minors_tp(OSC3, tol).verdict is Verdict.NO),
    ("Hankel pattern", lambda tol: is_hankel(np.array([[1, 2, 3], [2, 3, 4], [3, 4, 5.]]), tol)
     and not is_hankel(example2(0.5), tol)),
    ("s- of [2,e,-3]", lambda tol: s_minus([2.0, 1e-3, -3.0], tol) == 1),
    ("s-/s+ of [-1,0,0,4]", lambda tol: s_minus([-1, 0, 0, 4.], tol) == 1
     and s_plus([-1, 0, 0, 4.], tol) == 3 and not in_V([-1, 0, 0, 4.], tol)),
    ("VDP 2x2 example", lambda tol: vdp_tp_check([[1, 2], [1, 4.]], [1, -1.], tol)),
    ("k=1 positivity", lambda tol: s_plus(M1234 @ np.ones(2), tol) == 0),
    ("d_pm(3)", lambda tol: np.array_equal(d_pm(3), np.diag([1.0, -1.0, 1.0]))),
    ("orientation lemma example", _orientation_example),
    ("TP family integral", lambda tol: np.allclose(
        integrate(example2), [[1.01, 1.5], [math.log(2), 1.0]], atol=1e-10, rtol=0)),
    ("TP family with non-TN integral", lambda tol: classify_tn(integrate(example2), tol).verdict
     is Verdict.NO),
    ("TP family certificate fails", lambda tol: envelope_checkerboard_certificate(
        example2, tol=tol).verdict is Verdict.NO),
    ("perturbed chain family certified", lambda tol: envelope_checkerboard_certificate(
        example7_family(0.01), tol=tol).verdict is YES),
    ("TP family not Hankel", lambda tol: hankel_certificate(example2, 9, tol=tol).verdict
     is Verdict.NO),
    ("perturbation radius", lambda tol: 0.0118 < max_tp_radius(
        chain_matrix(), np.eye(3)[:, [0]] @ np.eye(3)[[2], :], tol) < 0.0125),
    ("Euler tridiagonal oscillatory range", _euler_family),
    ("Euler tridiagonal eigen-expansion", _eigen),
    ("Euler tridiagonal epsilon bound", _edist),
    ("tanh network ODTS h=1", lambda tol: _odts(tanh_network, 1, tol)),
    ("phosphorelay ODTS h=3", lambda tol: _odts(phosphorelay, 3, tol)),
    ("osc3 linear system ODTS h=2", lambda tol: _odts(linear_tv, 2, tol)),
    ("tanh network invariance", lambda tol: _invariance(tanh_network)),
    ("phosphorelay invariance", lambda tol: _invariance(phosphorelay)),
    ("phosphorelay period 8", lambda tol: _fig_period(phosphorelay, [0.5, 0.1, 0.6, 0.3],
                                                      24, 8, 336)),
    ("tanh network period 12", lambda tol: _fig_period(tanh_network, [2.0, 3.0], 12, 12, 168)),
]


# -- randomized subset --------------------------------------------------------

def _prop_vdp_tp(rng, tol):
    n = int(rng.integers(2, 6))
    A = gaussian_kernel_tp(n, rng)
    x = sample_low_variation(n, n - 1, rng)
    return vdp_tp_check(A, x, tol)


def _prop_vdp_tn(rng, tol):
    n = int(rng.integers(2, 6))
    return vdp_tn_check(bidiagonal_tn(n, rng), rng.standard_normal(n), tol)


def _prop_cauchy_binet(rng, tol):
    n = int(rng.integers(2, 6))
    A, B = rng.standard_normal((n, n)), rng.standard_normal((n, n))
    r = int(rng.integers(1, n + 1))
    rows = sorted(rng.choice(np.arange(1, n + 1), r, replace=False))
    cols = sorted(rng.choice(np.arange(1, n + 1), r, replace=False))
    direct = minor(A @ B, rows, cols)
    cb = cauchy_binet_minor(A, B, rows, cols)
    return abs(direct - cb) <= 1e-9 * max(1.0, abs(direct))


def _prop_s_plus(rng, tol):
    n = int(rng.integers(1, 9))
    y = rng.choice([-1.0, 0.0, 1.0], n) * (0.5 + rng.random(n))
    zeros = np.flatnonzero(y == 0)
    best = 0
    for fill in itertools.product([-1.0, 1.0], repeat=len(zeros)):
        z = y.copy()
        z[zeros] = fill
        best = max(best, int(np.sum(z[1:] * z[:-1] < 0)))
    return s_plus(y, tol) == best


PROPERTIES = [("VDP for TP", _prop_vdp_tp), ("VDP for TN", _prop_vdp_tn),
              ("Cauchy-Binet identity", _prop_cauchy_binet),
              ("greedy s+ vs brute force", _prop_s_plus)]


@dataclass
class SelftestRow:
    name: str
    passed: bool
    detail: str = ""


def selftest(tol=DEFAULT_TOL, trials=100, seed=None):
    """Run goldens and properties; returns the list of rows."""
    rows = []
    for name, check in GOLDEN:
        try:
            ok, detail = bool(check(tol)), ""
        except Exception as exc:        # a crash is a failure, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append(SelftestRow(name, ok, detail))
    rng = make_rng(seed)
    for name, prop in PROPERTIES:
        fails = sum(not prop(rng, tol) for _ in range(trials))
        rows.append(SelftestRow(f"{name} ({trials} trials)", fails == 0,
                                f"{fails} failures" if fails else ""))
    return rows


def format_table(rows):
    width = max(len(r.name) for r in rows)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}".rstrip()
             for r in rows]
    lines.append(f"{sum(r.passed for r in rows)}/{len(rows)} passed")
    return "\n".join(lines)
