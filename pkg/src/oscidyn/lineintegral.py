"""Matrix-valued quadrature on [0, 1], Jacobian line integrals and TP certificates.

A matrix function is any callable ``t -> (n, n) array`` on [0, 1].  An
optional ``breakpoints`` attribute (sorted values in (0, 1)) tells
:func:`integrate` where the integrand has kinks.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .classify import Verdict, classify_tn, classify_tp, is_hankel
from .matrix import DEFAULT_TOL, as_mat, as_vector
from .signvar import d_pm

# 5-point Gauss-Legendre on [-1, 1]; exact through degree 9
_G5_X = np.array([-math.sqrt(5 + 2 * math.sqrt(10 / 7)), -math.sqrt(5 - 2 * math.sqrt(10 / 7)),
                  0.0, math.sqrt(5 - 2 * math.sqrt(10 / 7)), math.sqrt(5 + 2 * math.sqrt(10 / 7))]) / 3
_G5_W = np.array([(322 - 13 * math.sqrt(70)) / 900, (322 + 13 * math.sqrt(70)) / 900, 128 / 225,
                  (322 + 13 * math.sqrt(70)) / 900, (322 - 13 * math.sqrt(70)) / 900])


class NonConvergentError(RuntimeError):
    """Panel doubling hit ``max_panels`` before two estimates agreed."""

    def __init__(self, message, previous, last):
        super().__init__(message)
        self.previous = previous
        self.last = last


@dataclass(frozen=True)
class QuadConfig:
    rule: str = "gauss5"
    initial_panels: int = 4
    refine_tol: float = 1e-10
    max_panels: int = 4096

    def __post_init__(self):
        if self.rule not in ("gauss5", "simpson"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.initial_panels < 1 or self.max_panels < self.initial_panels:
            raise ValueError("need 1 <= initial_panels <= max_panels")
        if not self.refine_tol > 0:
            raise ValueError("refine_tol must be positive")


DEFAULT_QUAD = QuadConfig()


def _nodes(a, b, panels, rule):
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    if rule == "gauss5":
        mid = (edges[:-1] + edges[1:]) / 2
        ts = (mid[:, None] + 0.5 * h[:, None] * _G5_X[None, :]).ravel()
        ws = (0.5 * h[:, None] * _G5_W[None, :]).ravel()
    else:
        mid = (edges[:-1] + edges[1:]) / 2
        ts = np.stack([edges[:-1], mid, edges[1:]], axis=1).ravel()
        ws = (h[:, None] * np.array([1, 4, 1])[None, :] / 6).ravel()
    return ts, ws


def _composite(fn, pieces, panels, rule):
    total = None
    # fixed left-to-right order keeps the sum reproducible
    for a, b in pieces:
        ts, ws = _nodes(a, b, panels, rule)
        for t, w in zip(ts, ws):
            term = w * np.asarray(fn(float(t)), dtype=float)
            total = term if total is None else total + term
    return total


def integrate(fn, q=DEFAULT_QUAD):
    """Entrywise integral of ``fn`` over [0, 1] with panel doubling."""
    cuts = [0.0] + [float(t) for t in getattr(fn, "breakpoints", ()) if 0.0 < t < 1.0] + [1.0]
    pieces = list(zip(cuts[:-1], cuts[1:]))
    panels = q.initial_panels
    prev = None
    cur = _composite(fn, pieces, panels, q.rule)
    if not np.all(np.isfinite(cur)):
        raise ValueError("integrand returned non-finite values")
    while prev is None or np.max(np.abs(cur - prev)) >= q.refine_tol:
        if 2 * panels > q.max_panels:
            raise NonConvergentError(
                f"no convergence to {q.refine_tol:g} within {q.max_panels} panels", prev, cur)
        prev = cur
        panels *= 2
        cur = _composite(fn, pieces, panels, q.rule)
    return cur


def F_segment(J, k, a, b, q=DEFAULT_QUAD):
    """``int_0^1 J(k, r a + (1 - r) b) dr``."""
    a, b = as_vector(a, "a"), as_vector(b, "b")
    if np.array_equal(a, b):
        return as_mat(J(k, a))
    return integrate(lambda r: J(k, r * a + (1 - r) * b), q)


def variational_matrix(system, k, xa, xb, q=DEFAULT_QUAD):
    """M(k) for the states ``xa = x(k, a)`` and ``xb = x(k, b)`` at time k.

    Satisfies ``x(k+1, b) - x(k+1, a) = M(k) (xb - xa)``.
    """
    return F_segment(system.jacobian, k, xb, xa, q)


def divided_difference(f, df, a, b):
    """``(f(a) - f(b)) / (a - b)``, or ``df`` at the midpoint once a and b are too close.

    The switch happens at ``|a - b| <= 1e-7 * max(1, |a|, |b|)``; the
    midpoint derivative is second-order accurate there.
    """
    if abs(a - b) <= 1e-7 * max(1.0, abs(a), abs(b)):
        return float(df(0.5 * (a + b)))
    return float((f(a) - f(b)) / (a - b))


def closed_form_F(C, fs, dfs, a, b, dds=None):
    """``C @ diag(g_1, ..., g_n)`` with g_i the divided difference of f_i.

    ``dds`` optionally supplies cancellation-free divided differences
    ``(a, b) -> g``; entries that are None fall back to the generic formula.
    """
    C, a, b = as_mat(C, "C"), as_vector(a, "a"), as_vector(b, "b")
    n = C.shape[1]
    dds = [None] * n if dds is None else list(dds)
    if not (len(fs) == len(dfs) == len(dds) == n == a.size == b.size):
        raise ValueError("closed_form_F: dimension mismatch")
    g = np.array([dd(ai, bi) if dd is not None else divided_difference(f, df, ai, bi)
                  for f, df, dd, ai, bi in zip(fs, dfs, dds, a, b)])
    return C * g[None, :]


class CertKind(str, Enum):
    CHECKERBOARD = "CheckerboardBounds"
    ENVELOPE = "Envelope"
    HANKEL = "Hankel"
    DOMINANCE = "Dominance"
    DIRECT = "DirectQuadrature"


@dataclass
class Certificate:
    kind: CertKind
    verdict: Verdict
    evidence: dict = field(default_factory=dict)
    sampled: bool = True

    def to_dict(self):
        return {"kind": self.kind.value, "verdict": self.verdict.value,
                "sampled": self.sampled, "evidence": _jsonable(self.evidence)}


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


def _grid(grid):
    if grid < 2:
        raise ValueError("grid needs at least 2 points")
    return np.linspace(0.0, 1.0, grid)


def checkerboard_certificate(fn, G, H, delta, grid=257, tol=DEFAULT_TOL):
    """Sampled check of ``delta + s g_ij <= s a_ij(t) <= -delta + s h_ij``, s = (-1)^(i+j).

    G and H must be TN.  Passing at every grid point yields verdict YES,
    which implies the integral of ``fn`` is TP.
    """
    G, H = as_mat(G, "G"), as_mat(H, "H")
    if not delta > 0:
        raise ValueError("delta must be positive")
    for name, M in (("G", G), ("H", H)):
        if classify_tn(M, tol).verdict is not Verdict.YES:
            raise ValueError(f"{name} is not TN")
    i, j = np.indices(G.shape)
    s = np.where((i + j) % 2 == 0, 1.0, -1.0)
    lower, upper = delta + s * G, -delta + s * H
    for t in _grid(grid):
        sa = s * as_mat(fn(float(t)))
        bad = np.argwhere((sa < lower) | (sa > upper))
        if bad.size:
            r, c = bad[0]
            return Certificate(CertKind.CHECKERBOARD, Verdict.NO, {
                "t": float(t), "i": int(r) + 1, "j": int(c) + 1,
                "value": float(sa[r, c] * s[r, c]), "grid": grid, "delta": delta})
    return Certificate(CertKind.CHECKERBOARD, Verdict.YES,
                       {"G": G, "H": H, "delta": delta, "grid": grid})


def envelope_bounds(fn, grid=257):
    """Checkerboard envelope (P, Q) of ``fn`` over the sample grid.

    ``p_ij`` is the entry minimum when i+j is even and the maximum when odd;
    ``q_ij`` the other way round, so ``P <=+ fn(t) <=+ Q`` on the grid.
    """
    samples = np.stack([as_mat(fn(float(t))) for t in _grid(grid)])
    lo, hi = samples.min(axis=0), samples.max(axis=0)
    i, j = np.indices(lo.shape)
    even = (i + j) % 2 == 0
    return np.where(even, lo, hi), np.where(even, hi, lo)


def envelope_checkerboard_certificate(fn, delta=1e-6, grid=257, tol=DEFAULT_TOL):
    """Checkerboard certificate with bounds taken from the sampled envelope.

    The envelope is widened by ``delta`` in the checkerboard direction so
    the strict margins hold on the grid.  Widened bounds that are not TN
    give verdict NO: the certificate cannot be issued.
    """
    P, Q = envelope_bounds(fn, grid)
    i, j = np.indices(P.shape)
    s = np.where((i + j) % 2 == 0, 1.0, -1.0)
    G, H = P - 2 * delta * s, Q + 2 * delta * s
    for name, M in (("G", G), ("H", H)):
        d = classify_tn(M, tol)
        if d.verdict is not Verdict.YES:
            return Certificate(CertKind.CHECKERBOARD, Verdict.NO if d.verdict is Verdict.NO
                               else Verdict.INCONCLUSIVE,
                               {"reason": f"bound {name} is not TN", "G": G, "H": H,
                                "witness": d.to_dict(), "grid": grid, "delta": delta})
    return checkerboard_certificate(fn, G, H, delta, grid, tol)


def envelope_certificate(fn, grid=257, tol=DEFAULT_TOL):
    P, Q = envelope_bounds(fn, grid)
    vp, vq = classify_tp(P, tol).verdict, classify_tp(Q, tol).verdict
    if vp is Verdict.YES and vq is Verdict.YES:
        verdict = Verdict.YES
    elif Verdict.NO in (vp, vq):
        verdict = Verdict.NO
    else:
        verdict = Verdict.INCONCLUSIVE
    return Certificate(CertKind.ENVELOPE, verdict,
                       {"P": P, "Q": Q, "P_TP": vp, "Q_TP": vq, "grid": grid})


def perturbation_bounds(A, B, v):
    """``P(v) = A - v D B D`` and ``Q(v) = A + v D B D``."""
    A, B = as_mat(A, "A"), as_mat(B, "B")
    if v < 0:
        raise ValueError("v must be nonnegative")
    if np.any(B < 0):
        raise ValueError("B must be entrywise nonnegative")
    D = d_pm(A.shape[0])
    S = D @ B @ D
    return A - v * S, A + v * S


def max_tp_radius(A, B, tol=DEFAULT_TOL, abs_tol=1e-8):
    """Supremum of v with P(v) and Q(v) both TP, by bisection.

    Returns ``math.inf`` when B is zero.
    """
    A, B = as_mat(A, "A"), as_mat(B, "B")
    if classify_tp(A, tol).verdict is not Verdict.YES:
        raise ValueError("A is not TP")
    if not np.any(B > 0):
        return math.inf

    def both_tp(v):
        P, Q = perturbation_bounds(A, B, v)
        return (classify_tp(P, tol).verdict is Verdict.YES
                and classify_tp(Q, tol).verdict is Verdict.YES)

    lo, hi = 0.0, max(1.0, float(np.abs(A).max())) / float(B.max())
    while both_tp(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > abs_tol:
        mid = 0.5 * (lo + hi)
        if both_tp(mid):
            lo = mid
        else:
            hi = mid
    return lo


def hankel_certificate(fn, grid=257, q=DEFAULT_QUAD, tol=DEFAULT_TOL):
    """Sampled check that ``fn(t)`` is a TP Hankel matrix at every grid point.

    On YES the integral is computed and attached, together with its own TP
    classification, as evidence.
    """
    for t in _grid(grid):
        M = as_mat(fn(float(t)))
        if not is_hankel(M, tol):
            return Certificate(CertKind.HANKEL, Verdict.NO, {"t": float(t), "reason": "not Hankel"})
        d = classify_tp(M, tol)
        if d.verdict is not Verdict.YES:
            return Certificate(CertKind.HANKEL, d.verdict,
                               {"t": float(t), "reason": "not TP", "witness": d.to_dict()})
    integral = integrate(fn, q)
    return Certificate(CertKind.HANKEL, Verdict.YES, {
        "grid": grid, "integral": integral,
        "integral_TP": classify_tp(integral, tol).to_dict()})


def direct_certificate(fn, q=DEFAULT_QUAD, tol=DEFAULT_TOL):
    """Integrate and classify the result; no structure assumed."""
    integral = integrate(fn, q)
    d = classify_tp(integral, tol)
    return Certificate(CertKind.DIRECT, d.verdict,
                       {"integral": integral, "TP": d.to_dict(),
                        "TN": classify_tn(integral, tol).to_dict()},
                       sampled=False)


class GridMatFn:
    """Piecewise-linear interpolation of matrices sampled at increasing ts."""

    def __init__(self, ts, mats):
        self.ts = np.asarray(ts, dtype=float)
        self.mats = np.stack([as_mat(M) for M in mats])
        if self.ts.ndim != 1 or len(self.ts) != len(self.mats) or len(self.ts) < 2:
            raise ValueError("grid needs matching ts and mats, at least two of each")
        if np.any(np.diff(self.ts) <= 0) or self.ts[0] > 0 or self.ts[-1] < 1:
            raise ValueError("ts must be strictly increasing and cover [0, 1]")
        self.breakpoints = tuple(self.ts[1:-1])

    def __call__(self, t):
        k = int(np.clip(np.searchsorted(self.ts, t, side="right") - 1, 0, len(self.ts) - 2))
        t0, t1 = self.ts[k], self.ts[k + 1]
        w = (t - t0) / (t1 - t0)
        return (1 - w) * self.mats[k] + w * self.mats[k + 1]


def example2(t):
    """TP for every t in [0, 1] although its integral is not TN."""
    return np.array([[1.01, t + 1.0], [1.0 / (t + 1.0), 1.0]])


def example7_family(v):
    """Chain matrix with its (1, 3) entry swept linearly over [a13 - v, a13 + v]."""
    from .models import chain_matrix
    A = chain_matrix()
    E = np.zeros((3, 3))
    E[0, 2] = 1.0

    def fn(t):
        return A + v * (2 * t - 1) * E
    return fn


BUILTINS = {"example2": example2, "example7": example7_family(0.01)}
