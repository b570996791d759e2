"""TP / TN / SSR_k / oscillatory classification and structural sufficient conditions.

Every verdict is tri-state.  A verdict is ``INCONCLUSIVE`` when no minor
definitely violates the property but at least one minor is marginal under
the active :class:`~oscidyn.matrix.Tolerance`.
"""
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .matrix import (DEFAULT_TOL, MinorRecord, as_mat, check_size, det,
                     matpow, minor_table)
from . import kernels


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"

    def __bool__(self):
        return self is Verdict.YES


class SSR(str, Enum):
    ALL_POSITIVE = "AllPositive"
    ALL_NEGATIVE = "AllNegative"
    MIXED = "Mixed"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Decision:
    """A tri-state verdict plus the minor that justifies it.

    For YES the witness is the smallest minor; for NO the lexicographically
    first violating minor (lowest order first); for INCONCLUSIVE the first
    marginal minor.
    """
    verdict: Verdict
    witness: Optional[MinorRecord] = None
    note: str = ""

    def to_dict(self):
        return {"verdict": self.verdict.value,
                "witness": _record_dict(self.witness),
                "note": self.note}


def _record_dict(rec):
    if rec is None:
        return None
    return {"rows": list(rec.rows), "cols": list(rec.cols), "value": rec.value}


def _record(rc, cc, vals, flat_index):
    a, b = np.unravel_index(flat_index, vals.shape)
    return MinorRecord(tuple(int(i) + 1 for i in rc[a]),
                       tuple(int(j) + 1 for j in cc[b]),
                       float(vals[a, b]))


def _interval_sets(n, r):
    return np.array([np.arange(p, p + r) for p in range(n - r + 1)], dtype=np.int64)


def _scan(A, bad, marginal, contiguous=False):
    """Walk minors order by order; stop at the first definite violation."""
    n, m = A.shape
    first_marginal = None
    smallest = None
    for order in range(1, min(n, m) + 1):
        if contiguous:
            rc, cc = _interval_sets(n, order), _interval_sets(m, order)
            vals = kernels.minor_values(A, rc, cc)
        else:
            rc, cc, vals = minor_table(A, order)
        flat = vals.ravel()
        hits = np.flatnonzero(bad(flat))
        if hits.size:
            return Decision(Verdict.NO, _record(rc, cc, vals, hits[0]))
        if first_marginal is None:
            marg = np.flatnonzero(marginal(flat))
            if marg.size:
                first_marginal = _record(rc, cc, vals, marg[0])
        lo = int(np.argmin(flat))
        if smallest is None or flat[lo] < smallest.value:
            smallest = _record(rc, cc, vals, lo)
    if first_marginal is not None:
        return Decision(Verdict.INCONCLUSIVE, first_marginal, "marginal minor")
    return Decision(Verdict.YES, smallest)


def _tp_rules(tol):
    def marginal(v):
        return (np.abs(v) > tol.zero_eps) & (np.abs(v) <= tol.pos_eps)

    def bad(v):
        return (v <= tol.pos_eps) & ~marginal(v)

    return bad, marginal


def classify_tp(A, tol=DEFAULT_TOL):
    """Is every minor of every order positive?"""
    A = as_mat(A)
    check_size(A)
    return _scan(A, *_tp_rules(tol))


def classify_tn(A, tol=DEFAULT_TOL):
    """Is every minor of every order nonnegative?"""
    A = as_mat(A)
    check_size(A)
    return _scan(A,
                 lambda v: v < -tol.pos_eps,
                 lambda v: (v >= -tol.pos_eps) & (v < -tol.zero_eps))


def contiguous_minors_tp(A, tol=DEFAULT_TOL):
    """TP test restricted to minors with interval row and column sets.

    For square matrices positivity of these minors already implies TP, so the
    verdict must agree with :func:`classify_tp`.
    """
    A = as_mat(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("contiguous_minors_tp needs a square matrix")
    return _scan(A, *_tp_rules(tol), contiguous=True)


def ssr_order(A, k, tol=DEFAULT_TOL):
    """Sign pattern of all order-k minors.

    Zero or marginal minors make the answer ``INCONCLUSIVE`` unless minors of
    both strict signs are present, in which case it is ``MIXED``.
    """
    A = as_mat(A)
    check_size(A)
    if not 1 <= k <= min(A.shape):
        raise ValueError(f"order {k} outside 1..{min(A.shape)}")
    _, _, vals = minor_table(A, k)
    pos = vals > tol.pos_eps
    neg = vals < -tol.pos_eps
    if pos.all():
        return SSR.ALL_POSITIVE
    if neg.all():
        return SSR.ALL_NEGATIVE
    if pos.any() and neg.any():
        return SSR.MIXED
    return SSR.INCONCLUSIVE


def is_irreducible(A, tol=DEFAULT_TOL):
    """Strong connectivity of the graph with an edge i->j when |a_ij| > zero_eps."""
    A = as_mat(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("is_irreducible needs a square matrix")
    adj = np.abs(A) > tol.zero_eps
    np.fill_diagonal(adj, False)

    def reach(g):
        seen = {0}
        todo = deque([0])
        while todo:
            i = todo.popleft()
            for j in np.flatnonzero(g[i]):
                if j not in seen:
                    seen.add(int(j))
                    todo.append(int(j))
        return len(seen) == n

    return reach(adj) and reach(adj.T)


@dataclass
class OscillatoryDecision:
    verdict: Verdict
    exponent: Optional[int] = None
    note: str = ""

    def to_dict(self):
        return {"verdict": self.verdict.value, "exponent": self.exponent, "note": self.note}


def classify_oscillatory(A, tol=DEFAULT_TOL):
    """TN + nonsingular + irreducible, with the exponent found by direct search.

    Each power ``A**k`` is formed afresh and classified on its own; the
    exponent is reported only if every smaller power was a definite NO.
    ``A**(n-1)`` must come out TP, otherwise the result is INCONCLUSIVE.
    """
    A = as_mat(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("classify_oscillatory needs a square matrix")
    tn = classify_tn(A, tol)
    if tn.verdict is Verdict.NO:
        return OscillatoryDecision(Verdict.NO, note="not TN")
    if tn.verdict is Verdict.INCONCLUSIVE:
        return OscillatoryDecision(Verdict.INCONCLUSIVE, note="TN inconclusive")
    d = det(A)
    if abs(d) <= tol.zero_eps:
        return OscillatoryDecision(Verdict.NO, note="singular")
    if abs(d) <= tol.pos_eps:
        return OscillatoryDecision(Verdict.INCONCLUSIVE, note="determinant marginal")
    if not is_irreducible(A, tol):
        return OscillatoryDecision(Verdict.NO, note="reducible")

    top = max(1, n - 1)
    exponent = None
    ambiguous = False
    last = None
    for k in range(1, top + 1):
        last = classify_tp(matpow(A, k), tol).verdict
        if last is Verdict.YES:
            exponent = k
            break
        if last is Verdict.INCONCLUSIVE:
            ambiguous = True
    if exponent is not None and exponent < top:
        last = classify_tp(matpow(A, top), tol).verdict
    if last is not Verdict.YES:
        return OscillatoryDecision(Verdict.INCONCLUSIVE,
                                   note=f"A^{top} did not classify TP ({last.value})")
    if ambiguous:
        return OscillatoryDecision(Verdict.YES, None, "exponent ambiguous: marginal power")
    return OscillatoryDecision(Verdict.YES, exponent)


def tridiagonal_dominance_tn(A, tol=DEFAULT_TOL):
    """Row dominance ``a_i >= b_i + c_{i-1}`` for a nonnegative tridiagonal matrix.

    ``b_i`` is the super-diagonal and ``c_{i-1}`` the sub-diagonal entry of
    row i.  True is a sufficient (not necessary) certificate for TN.
    """
    A = as_mat(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("tridiagonal_dominance_tn needs a square matrix")
    i, j = np.indices(A.shape)
    off_band = np.abs(i - j) > 1
    if np.any(np.abs(A[off_band]) > tol.zero_eps):
        raise ValueError("matrix is not tridiagonal")
    super_ = np.append(np.diag(A, 1), 0.0)
    sub = np.insert(np.diag(A, -1), 0, 0.0)
    if np.any(super_ < -tol.zero_eps) or np.any(sub < -tol.zero_eps):
        raise ValueError("tridiagonal matrix has negative off-diagonal entries")
    return bool(np.all(np.diag(A) >= super_ + sub - tol.zero_eps))


def is_hankel(A, tol=DEFAULT_TOL):
    """Constant along every anti-diagonal, within zero_eps."""
    A = as_mat(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("is_hankel needs a square matrix")
    flipped = A[:, ::-1]
    for offset in range(-(n - 1), n):
        d = np.diagonal(flipped, offset)
        if d.max() - d.min() > tol.zero_eps:
            return False
    return True


@dataclass
class Classification:
    """Verdict record for one matrix."""
    shape: tuple
    is_tp: Decision
    is_tn: Decision
    ssr: dict = field(default_factory=dict)
    is_oscillatory: Optional[OscillatoryDecision] = None

    @property
    def exponent(self):
        return None if self.is_oscillatory is None else self.is_oscillatory.exponent

    def to_dict(self):
        return {
            "shape": list(self.shape),
            "is_TP": self.is_tp.to_dict(),
            "is_TN": self.is_tn.to_dict(),
            "ssr": {str(k): v.value for k, v in self.ssr.items()},
            "is_oscillatory": None if self.is_oscillatory is None
            else self.is_oscillatory.to_dict(),
            "exponent": self.exponent,
        }


def classify(A, tol=DEFAULT_TOL, orders=None):
    """Full classification; oscillatory status only for square matrices."""
    A = as_mat(A)
    check_size(A)
    if orders is None:
        orders = range(1, min(A.shape) + 1)
    osc = classify_oscillatory(A, tol) if A.shape[0] == A.shape[1] else None
    return Classification(
        shape=A.shape,
        is_tp=classify_tp(A, tol),
        is_tn=classify_tn(A, tol),
        ssr={int(k): ssr_order(A, int(k), tol) for k in orders},
        is_oscillatory=osc,
    )
