import math

import numpy as np
import pytest

from oscidyn.dynamics import jacobian_fd_error
from oscidyn.models import (REGISTRY, Wave, build_model, chain_matrix, euler_discretize,
                            euler_linear, phosphorelay, tanh_network)


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_jacobian_matches_finite_differences(rng, name):
    sys_ = build_model(name)
    lo = np.where(np.isfinite(sys_.lower), sys_.lower, -2.0)
    hi = np.where(np.isfinite(sys_.upper), sys_.upper, 2.0)
    lo, hi = np.maximum(lo, -2.0), np.minimum(hi, 8.0)
    for _ in range(100):
        x = lo + (hi - lo) * (0.05 + 0.9 * rng.random(sys_.dim))
        k = int(rng.integers(3 * sys_.period))
        assert jacobian_fd_error(sys_, k, x) < 1e-5


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_maps_are_periodic(rng, name):
    sys_ = build_model(name)
    for _ in range(20):
        x = sys_.sample(rng) if np.all(np.isfinite(sys_.upper)) else rng.standard_normal(sys_.dim)
        k = int(rng.integers(50))
        np.testing.assert_allclose(sys_.f(k, x), sys_.f(k + sys_.period, x), atol=1e-12)


def test_stimulus_formula():
    c = Wave.from_json({"base": 3, "amp": 1, "period": 8})
    for k in range(16):
        assert c(k) == pytest.approx(3 + math.sin(k * math.pi / 4))
    assert Wave.from_json(0.5)(7) == 0.5
    with pytest.raises(ValueError):
        Wave.from_json({"wave": "square"})


def test_euler_discretize():
    ident = euler_discretize(lambda k, x: np.zeros_like(x), lambda k, x: np.zeros((2, 2)), 0.1,
                             dim=2)
    x = np.array([0.3, -1.0])
    np.testing.assert_array_equal(ident.f(0, x), x)
    sys_ = euler_linear({"eps": 0.3})
    tri = np.eye(3, k=1) + np.eye(3, k=-1)
    np.testing.assert_allclose(sys_.jacobian(0, np.zeros(3)), np.eye(3) + 0.3 * tri)
    with pytest.raises(ValueError):
        euler_discretize(lambda k, x: x, lambda k, x: np.eye(1), 0.0, dim=1)
    with pytest.raises(ValueError):
        euler_discretize(lambda k, x: x, lambda k, x: np.eye(1), 0.1)


def test_phosphorelay_structure():
    sys_ = phosphorelay()
    x = np.array([0.5, 0.1, 0.6, 0.3])
    J = sys_.field_jacobian(0, x)
    np.testing.assert_allclose(np.diag(J, 1), x[:-1])             # eta_i x_i with eta = 1
    np.testing.assert_allclose(np.diag(J, -1), np.array([2.0, 2, 2]) - x[1:])
    assert np.all(np.abs(np.triu(J, 2)) == 0) and np.all(np.abs(np.tril(J, -2)) == 0)
    np.testing.assert_allclose(sys_.upper, [0.8, 2, 2, 2])
    with pytest.raises(ValueError):
        phosphorelay({"xi": [-1.0, 3.0, 3.0]})
    with pytest.raises(ValueError):
        phosphorelay({"eta": [1.0, 1.0]})


def test_tanh_network():
    sys_ = tanh_network()
    assert sys_.period == 12 and sys_.dim == 2
    C0 = sys_.scalar_form.C(0)
    assert C0[1, 0] == 0.5
    assert C0[0, 0] == pytest.approx(2 + math.cos(0.5))


def test_chain_matrix_and_registry():
    A = chain_matrix()
    assert A[0, 2] == pytest.approx(0.65 * math.exp(-4))
    with pytest.raises(ValueError):
        build_model("nope")
