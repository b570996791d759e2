"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``OSCIDYN_DISABLE_JIT`` is not
set. Both backends stay importable so tests and the benchmark can compare them.
"""
import numpy as np

from .._config import jit_requested
from . import _numpy

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

BACKENDS = {"numpy": _numpy}
if _numba is not None:
    BACKENDS["numba"] = _numba

BACKEND = "numba" if (_numba is not None and jit_requested()) else "numpy"
_impl = BACKENDS[BACKEND]


def det(M):
    return float(_impl.det(np.ascontiguousarray(M, dtype=np.float64)))


def minor_values(A, row_combos, col_combos):
    return _impl.minor_values(np.ascontiguousarray(A, dtype=np.float64),
                              np.ascontiguousarray(row_combos, dtype=np.int64),
                              np.ascontiguousarray(col_combos, dtype=np.int64))


def sign_counts(Y, zero_eps):
    Y = np.ascontiguousarray(np.atleast_2d(Y), dtype=np.float64)
    return _impl.sign_counts(Y, float(zero_eps))
