import numpy as np
import pytest

from oscidyn import kernels
from oscidyn.kernels import BACKENDS
from oscidyn.matrix import combinations

pytestmark = pytest.mark.skipif("numba" not in BACKENDS, reason="numba not installed")


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_det_backends_agree(rng, n):
    for _ in range(20):
        M = rng.standard_normal((n, n))
        ref = np.linalg.det(M)
        for name, impl in BACKENDS.items():
            assert impl.det(M) == pytest.approx(ref, rel=1e-10, abs=1e-12), name


def test_det_singular_pivot_path():
    M = np.array([[0.0, 1, 2, 3], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1.0]])
    for impl in BACKENDS.values():
        assert impl.det(M) == pytest.approx(-1.0)
    Z = np.ones((4, 4))
    for impl in BACKENDS.values():
        assert impl.det(Z) == 0.0


@pytest.mark.parametrize("n,r", [(3, 1), (4, 2), (5, 3), (6, 4), (7, 5)])
def test_minor_values_backends_agree(rng, n, r):
    A = rng.standard_normal((n, n + 1))
    rc, cc = combinations(n, r), combinations(n + 1, r)
    a = BACKENDS["numpy"].minor_values(A, rc, cc)
    b = BACKENDS["numba"].minor_values(A, rc, cc)
    assert a.shape == (len(rc), len(cc))
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


def test_sign_counts_backends_agree(rng):
    Y = rng.choice([-1.0, 0.0, 1.0], size=(3000, 9)) * rng.random((3000, 9))
    Y[0] = 0.0
    sm_a, sp_a = BACKENDS["numpy"].sign_counts(Y, 1e-12)
    sm_b, sp_b = BACKENDS["numba"].sign_counts(Y, 1e-12)
    np.testing.assert_array_equal(sm_a, sm_b)
    np.testing.assert_array_equal(sp_a, sp_b)
    assert sm_a[0] == 0 and sp_a[0] == 8


def test_dispatch_wrappers_coerce_inputs():
    assert kernels.det([[1, 2], [3, 4]]) == pytest.approx(-2.0)
    sm, sp = kernels.sign_counts([1, 0, -1], 0.0)
    assert (sm[0], sp[0]) == (1, 1)


def test_env_flag_selects_numpy(monkeypatch):
    import importlib

    from oscidyn import _config
    monkeypatch.setenv(_config.JIT_ENV, "1")
    assert not _config.jit_requested()
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "numpy"
    finally:
        monkeypatch.delenv(_config.JIT_ENV)
        importlib.reload(kernels)
