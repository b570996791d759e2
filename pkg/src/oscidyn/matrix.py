"""Dense small-matrix arithmetic, minor enumeration and the sign tolerance policy.

Matrices are plain 2-D float64 numpy arrays. Index sets follow the usual
minor notation ``A(rows|cols)`` and are **1-based** strictly increasing
sequences, so ``minor(A, (1, 2), (2, 3))`` is the minor on the first two
rows and the last two columns of a 3x3 matrix.
"""
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import kernels

#: Exhaustive minor enumeration is refused above this dimension.
SIZE_CAP = 10


@dataclass(frozen=True)
class Tolerance:
    """Thresholds for every sign decision.

    A quantity ``q`` is positive iff ``q > pos_eps``, negative iff
    ``q < -pos_eps`` and zero iff ``|q| <= zero_eps``.  Values with
    ``zero_eps < |q| <= pos_eps`` are *marginal*: their sign is not trusted.
    """
    pos_eps: float = 1e-9
    zero_eps: float = 1e-12

    def __post_init__(self):
        if not self.pos_eps > 0:
            raise ValueError(f"pos_eps must be > 0, got {self.pos_eps}")
        if not self.zero_eps >= 0:
            raise ValueError(f"zero_eps must be >= 0, got {self.zero_eps}")
        if not self.pos_eps > self.zero_eps:
            raise ValueError("pos_eps must exceed zero_eps")

    def is_marginal(self, q):
        return self.zero_eps < abs(q) <= self.pos_eps

    @classmethod
    def parse(cls, text):
        """Parse ``"pos_eps,zero_eps"`` as used on the command line."""
        pos, zero = (float(s) for s in text.split(","))
        return cls(pos, zero)


DEFAULT_TOL = Tolerance()


class MinorRecord(NamedTuple):
    rows: tuple
    cols: tuple
    value: float


def as_mat(A, name="matrix"):
    """Coerce to a finite 2-D float array, raising ``ValueError`` otherwise."""
    M = np.array(A, dtype=np.float64)
    if M.ndim == 1 and M.size > 0:
        M = M[None, :]
    if M.ndim != 2 or M.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def as_vector(x, name="vector"):
    v = np.array(x, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def _index_set(idx, bound, label):
    """Validate a 1-based index set and return it 0-based."""
    try:
        items = [int(i) for i in idx]
    except TypeError:
        items = [int(idx)]
    if not items:
        raise ValueError(f"{label} index set is empty")
    for i in items:
        if not 1 <= i <= bound:
            raise IndexError(f"{label} index {i} outside 1..{bound}")
    if any(b <= a for a, b in zip(items, items[1:])):
        raise ValueError(f"{label} index set {items} is not strictly increasing")
    return np.array(items, dtype=np.int64) - 1


def submatrix(A, rows, cols):
    A = as_mat(A)
    r = _index_set(rows, A.shape[0], "row")
    c = _index_set(cols, A.shape[1], "column")
    return A[np.ix_(r, c)]


def det(M):
    """Determinant: closed form up to order 3, LU with partial pivoting above."""
    M = as_mat(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"determinant of non-square {M.shape} matrix")
    return kernels.det(M)


def minor(A, rows, cols):
    A = as_mat(A)
    r = _index_set(rows, A.shape[0], "row")
    c = _index_set(cols, A.shape[1], "column")
    if len(r) != len(c):
        raise ValueError(f"minor needs equal-size index sets, got {len(r)} and {len(c)}")
    return kernels.det(A[np.ix_(r, c)])


@lru_cache(maxsize=None)
def combinations(n, r):
    """All r-subsets of range(n) in lexicographic order, as an int array."""
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    arr = np.array(list(itertools.combinations(range(n), r)), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def minor_table(A, order):
    """Return (row_combos, col_combos, values) for all minors of one order.

    Combinations are 0-based; ``values[a, b]`` is the minor on
    ``row_combos[a]`` x ``col_combos[b]``.  Flattening ``values`` in C order
    gives the lexicographic enumeration used for witness selection.
    """
    A = as_mat(A)
    n, m = A.shape
    if not 1 <= order <= min(n, m):
        raise ValueError(f"order {order} outside 1..{min(n, m)}")
    rc, cc = combinations(n, order), combinations(m, order)
    return rc, cc, kernels.minor_values(A, rc, cc)


def all_minors(A, order):
    """Every minor of the given order, as 1-based records in lexicographic order."""
    rc, cc, vals = minor_table(A, order)
    out = []
    for a, rows in enumerate(rc):
        r1 = tuple(int(i) + 1 for i in rows)
        for b, cols in enumerate(cc):
            out.append(MinorRecord(r1, tuple(int(j) + 1 for j in cols), float(vals[a, b])))
    return out


def check_size(A, cap=SIZE_CAP):
    if max(A.shape) > cap:
        raise ValueError(f"matrix of shape {A.shape} exceeds the enumeration cap n <= {cap}")


def matmul(A, B):
    A, B = as_mat(A, "A"), as_mat(B, "B")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def matpow(A, k):
    """A**k by repeated squaring, k >= 1."""
    A = as_mat(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("matpow needs a square matrix")
    if int(k) != k or k < 1:
        raise ValueError(f"power must be an integer >= 1, got {k}")
    k = int(k)
    result = None
    base = A
    while k:
        if k & 1:
            result = base if result is None else result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def cauchy_binet_minor(A, B, rows, cols):
    """Minor of AB on (rows, cols) as a sum over intermediate index sets."""
    A, B = as_mat(A, "A"), as_mat(B, "B")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    r = _index_set(rows, A.shape[0], "row")
    c = _index_set(cols, B.shape[1], "column")
    if len(r) != len(c):
        raise ValueError("minor needs equal-size index sets")
    order = len(r)
    inner = A.shape[1]
    if order > inner:
        return 0.0
    gammas = combinations(inner, order)
    left = kernels.minor_values(A, r[None, :], gammas)[0]
    right = kernels.minor_values(B, gammas, c[None, :])[:, 0]
    return float(np.dot(left, right))
