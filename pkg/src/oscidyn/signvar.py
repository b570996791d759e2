"""Sign-variation counts and the variation-diminishing checks built on them.

Entries with ``|v| <= tol.zero_eps`` count as exact zeros before any
counting.  The all-zero vector has ``s_minus = 0``.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import kernels
from ._config import make_rng
from .classify import SSR, ssr_order
from .matrix import DEFAULT_TOL, as_mat, as_vector, det


def _signs(y, tol):
    y = as_vector(y)
    return np.where(np.abs(y) <= tol.zero_eps, 0, np.sign(y)).astype(int)


def s_minus(y, tol=DEFAULT_TOL):
    """Sign changes after deleting zero entries."""
    sm, _ = kernels.sign_counts(as_vector(y)[None, :], tol.zero_eps)
    return int(sm[0])


def s_plus(y, tol=DEFAULT_TOL):
    """Maximum sign changes over all +-1 fillings of the zero entries.

    Computed in one pass: a run of L zeros between nonzero entries of signs
    s, s' contributes the largest count <= L+1 whose parity matches
    ``s != s'``; leading and trailing zeros each contribute one.
    """
    _, sp = kernels.sign_counts(as_vector(y)[None, :], tol.zero_eps)
    return int(sp[0])


def sign_counts(Y, tol=DEFAULT_TOL):
    """Vectorised (s_minus, s_plus) over the rows of a 2-D array."""
    return kernels.sign_counts(np.asarray(Y, dtype=float), tol.zero_eps)


def in_V(y, tol=DEFAULT_TOL):
    """Nonzero endpoints, and every interior zero flanked by opposite signs."""
    s = _signs(y, tol)
    if s[0] == 0 or s[-1] == 0:
        return False
    inner = np.flatnonzero(s[1:-1] == 0) + 1
    return bool(np.all(s[inner - 1] * s[inner + 1] < 0))


def sigma(z, tol=DEFAULT_TOL):
    """Strict sign changes, extended to V by skipping interior zeros."""
    s = _signs(z, tol)
    if np.any(s == 0) and not in_V(z, tol):
        raise ValueError("sigma undefined: vector has zeros and is not in V")
    return s_minus(z, tol)


@dataclass
class SignProfile:
    s_minus: int
    s_plus: int
    in_V: bool
    sigma: Optional[int] = None

    def to_dict(self):
        return {"sigma": self.sigma, "s_minus": self.s_minus,
                "s_plus": self.s_plus, "in_V": self.in_V}


def profile(y, tol=DEFAULT_TOL):
    sm, sp = s_minus(y, tol), s_plus(y, tol)
    v = in_V(y, tol)
    return SignProfile(sm, sp, v, sm if v else None)


def vdp_tp_check(A, x, tol=DEFAULT_TOL):
    """``s_plus(Ax) <= s_minus(x)``; must hold for every TP ``A`` and ``x != 0``."""
    A, x = as_mat(A), as_vector(x)
    if np.all(np.abs(x) <= tol.zero_eps):
        raise ValueError("vdp_tp_check needs a nonzero vector")
    return s_plus(A @ x, tol) <= s_minus(x, tol)


def vdp_tn_check(A, x, tol=DEFAULT_TOL):
    """``s_minus(Ax) <= s_minus(x)``; must hold for every TN ``A``."""
    A, x = as_mat(A), as_vector(x)
    return s_minus(A @ x, tol) <= s_minus(x, tol)


def sample_low_variation(n, max_changes, rng, zero_prob=0.2):
    """Random x with ``s_minus(x) <= max_changes``, built from sign blocks."""
    blocks = int(rng.integers(1, min(max_changes, n - 1) + 2)) if n > 1 else 1
    cuts = np.sort(rng.choice(np.arange(1, n), size=blocks - 1, replace=False)) if blocks > 1 else []
    sign0 = rng.choice([-1.0, 1.0])
    x = np.empty(n)
    for b, chunk in enumerate(np.split(np.arange(n), cuts)):
        x[chunk] = sign0 * (-1) ** b * (0.1 + rng.random(len(chunk)))
    x[rng.random(n) < zero_prob] = 0.0
    if not np.any(x):
        x[rng.integers(n)] = sign0
    return x


@dataclass
class SSRProbeReport:
    k: int
    ssr: SSR
    samples: int
    violations: list = field(default_factory=list)
    counterexample_search: str = "not run"

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None

    def to_dict(self):
        return {"k": self.k, "ssr": self.ssr.value, "samples": self.samples,
                "violations": [{"x": list(map(float, x)), "s_plus_Ax": sp}
                               for x, sp in self.violations],
                "counterexample_search": self.counterexample_search}


def ssr_vdp_equivalence_probe(A, k, samples=1000, tol=DEFAULT_TOL, rng=None, search_budget=2000):
    """Probe ``s_minus(x) <= k-1  =>  s_plus(Ax) <= k-1`` on sampled x.

    For a nonsingular A this implication holds exactly when A is SSR_k.  When
    the order-k minors are MIXED a bounded counterexample search also runs
    (coordinate vectors first, then random sign-block vectors).
    """
    A = as_mat(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError("probe needs a square matrix")
    if abs(det(A)) <= tol.zero_eps:
        raise ValueError("probe needs a nonsingular matrix")
    rng = make_rng(rng)
    verdict = ssr_order(A, k, tol)
    report = SSRProbeReport(k, verdict, samples)

    def check(x):
        sp = s_plus(A @ x, tol)
        if sp > k - 1:
            report.violations.append((x, sp))
            return True
        return False

    for _ in range(samples):
        check(sample_low_variation(n, k - 1, rng))

    if verdict is SSR.MIXED:
        found = False
        for j in range(n):
            if check(np.eye(n)[j]) or check(-np.eye(n)[j]):
                found = True
                break
        for _ in range(search_budget if not found else 0):
            if check(sample_low_variation(n, k - 1, rng, zero_prob=0.5)):
                found = True
                break
        report.counterexample_search = "found" if found else "none found"
    return report


def d_pm(n):
    """diag(+1, -1, +1, ...)."""
    return np.diag([(-1.0) ** i for i in range(n)])


def checkerboard_leq(A, B, tol=DEFAULT_TOL):
    """Checkerboard order: ``(-1)^(i+j) a_ij <= (-1)^(i+j) b_ij`` entrywise."""
    A, B = as_mat(A, "A"), as_mat(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    i, j = np.indices(A.shape)
    s = np.where((i + j) % 2 == 0, 1.0, -1.0)
    return bool(np.all(s * A <= s * B + tol.zero_eps))


class Orientation(str, Enum):
    HOLDS = "Holds"
    HYPOTHESIS_NOT_MET = "HypothesisNotMet"
    VIOLATION = "VIOLATION"


def orientation_lemma_check(P, x, y, tol=DEFAULT_TOL):
    """If ``D P D x << D P D y`` (margin pos_eps) then ``x << y`` must follow.

    P is assumed TN and nonsingular.  VIOLATION means either P was
    misclassified or something upstream is wrong.
    """
    P, x, y = as_mat(P), as_vector(x, "x"), as_vector(y, "y")
    D = d_pm(P.shape[0])
    Q = D @ P @ D
    if not np.all(Q @ x < Q @ y - tol.pos_eps):
        return Orientation.HYPOTHESIS_NOT_MET
    if np.all(x < y):
        return Orientation.HOLDS
    return Orientation.VIOLATION


def no_overshoot_check(P, z0, K):
    """Along z(k+1) = P z(k), y = D z: no run y(0) << ... << y(i) >> y(i+1), i >= 1."""
    P, z = as_mat(P), as_vector(z0)
    D = np.diag(d_pm(P.shape[0]))
    ys = [D * z]
    for _ in range(K + 1):
        z = P @ z
        ys.append(D * z)
    i = 0
    while i + 1 < len(ys) and np.all(ys[i] < ys[i + 1]):
        i += 1
    if i >= 1 and i + 1 < len(ys) and np.all(ys[i] > ys[i + 1]):
        return False
    return True
