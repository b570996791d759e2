import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscidyn.classify import SSR, Verdict, classify_tn
from oscidyn.generators import bidiagonal_tn, gaussian_kernel_tp
from oscidyn.signvar import (Orientation, checkerboard_leq, d_pm, in_V, no_overshoot_check,
                             orientation_lemma_check, profile, s_minus, s_plus,
                             sample_low_variation, sigma, ssr_vdp_equivalence_probe,
                             vdp_tn_check, vdp_tp_check)


def brute_s_plus(y):
    zeros = [i for i, v in enumerate(y) if v == 0]
    best = 0
    for fill in itertools.product([-1, 1], repeat=len(zeros)):
        z = list(y)
        for i, f in zip(zeros, fill):
            z[i] = f
        best = max(best, sum(a * b < 0 for a, b in zip(z, z[1:])))
    return best


def test_goldens():
    y = [-1, 0, 0, 4]
    assert s_minus(y) == 1 and s_plus(y) == 3 and not in_V(y)
    assert s_minus([2, 1e-3, -3]) == 1 and s_minus([2, -1e-3, -3]) == 1
    assert s_minus([0, 0, 0]) == 0 and s_plus([0, 0, 0]) == 2
    assert sigma([1, 0, -1]) == 1 and in_V([1, 0, -1])
    with pytest.raises(ValueError):
        sigma([1, 0, 1])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from([-2.0, -1.0, 0.0, 1.0, 3.0]), min_size=1, max_size=10))
def test_s_plus_matches_brute_force(y):
    assert s_plus(y) == brute_s_plus(y)
    assert s_minus(y) <= s_plus(y)
    if any(y):
        assert in_V(y) == (s_minus(y) == s_plus(y))


def test_profile():
    p = profile([1, -2, 3])
    assert (p.s_minus, p.s_plus, p.in_V, p.sigma) == (2, 2, True, 2)
    assert profile([-1, 0, 0, 4]).to_dict()["sigma"] is None


def test_vdp_examples():
    assert vdp_tp_check([[1, 2], [1, 4]], [1, -1])
    with pytest.raises(ValueError):
        vdp_tp_check(np.eye(2), [0.0, 0.0])


def test_vdp_random(rng):
    for _ in range(300):
        n = int(rng.integers(2, 6))
        assert vdp_tp_check(gaussian_kernel_tp(n, rng), sample_low_variation(n, n - 1, rng))
        assert vdp_tn_check(bidiagonal_tn(n, rng), rng.standard_normal(n))


def test_sample_low_variation_respects_bound(rng):
    for _ in range(300):
        n, k = int(rng.integers(1, 8)), int(rng.integers(0, 4))
        x = sample_low_variation(n, k, rng)
        assert s_minus(x) <= k and np.any(x)


def test_ssr_probe(rng):
    rep = ssr_vdp_equivalence_probe([[1, 2], [3, 4]], 1, samples=200, rng=rng)
    assert rep.ssr is SSR.ALL_POSITIVE and not rep.violations
    rep = ssr_vdp_equivalence_probe([[1, -1], [1, 1]], 1, samples=50, rng=rng)
    assert rep.ssr is SSR.MIXED and rep.counterexample_search == "found"
    with pytest.raises(ValueError):
        ssr_vdp_equivalence_probe([[1, 1], [1, 1]], 1)


def test_checkerboard_order():
    np.testing.assert_array_equal(d_pm(3), np.diag([1.0, -1.0, 1.0]))
    assert checkerboard_leq([[0, 1], [1, 0]], [[1, 0], [0, 1]])
    assert not checkerboard_leq([[1, 0], [0, 1]], [[0, 1], [1, 0]])


def test_orientation_example():
    P = np.array([[1.0, 2.0], [3.0, 8.0]])
    x = np.array([0.0, 0.0])
    # hypothesis holds iff d1 < 0 and 3/8 < d2/d1 < 1/2, with d = x - y
    assert orientation_lemma_check(P, x, -np.array([-1.0, -0.45])) is Orientation.HOLDS
    assert orientation_lemma_check(P, x, -np.array([-1.0, -0.2])) is Orientation.HYPOTHESIS_NOT_MET
    assert orientation_lemma_check(P, x, -np.array([1.0, 0.45])) is Orientation.HYPOTHESIS_NOT_MET


def test_orientation_random(rng):
    for _ in range(200):
        n = int(rng.integers(2, 5))
        P = bidiagonal_tn(n, rng, zero_prob=0.0)
        D = d_pm(n)
        r = 0.01 + rng.random(n)
        x = rng.standard_normal(n)
        y = x + D @ np.linalg.solve(P, D @ r)
        assert orientation_lemma_check(P, x, y) is not Orientation.VIOLATION


def test_no_overshoot(rng):
    for _ in range(100):
        P = bidiagonal_tn(3, rng, zero_prob=0.0)
        assert classify_tn(P).verdict is Verdict.YES
        assert no_overshoot_check(P, rng.standard_normal(3), 20)
