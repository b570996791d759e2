"""Simulation, variational equations, ODTS-order certificates and period detection."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._config import make_rng
from .classify import Verdict, classify_oscillatory, classify_tn, classify_tp
from .lineintegral import DEFAULT_QUAD, F_segment, closed_form_F, variational_matrix
from .matrix import DEFAULT_TOL, as_vector
from .signvar import sign_counts


class SimulationError(RuntimeError):
    """The map produced a non-finite state."""


@dataclass
class Trajectory:
    states: np.ndarray          # (K + 1, n)
    system: str = ""
    exit_step: Optional[int] = None

    @property
    def steps(self):
        return len(self.states) - 1

    def to_csv(self, path):
        n = self.states.shape[1]
        header = ",".join(["k"] + [f"x_{i + 1}" for i in range(n)])
        data = np.column_stack([np.arange(len(self.states)), self.states])
        fmt = ["%d"] + ["%.17g"] * n
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt=fmt)


def simulate(system, x0, K):
    """Iterate ``x(k+1) = f(k, x(k))`` for K steps from ``x0`` in Omega.

    Leaving Omega is recorded in ``exit_step`` (first k with x(k) outside)
    and the run continues; a NaN or Inf aborts with :class:`SimulationError`.
    """
    x = as_vector(x0, "x0").copy()
    if x.size != system.dim:
        raise ValueError(f"x0 has {x.size} entries, system has dimension {system.dim}")
    if not system.contains(x):
        raise ValueError("x0 is outside the state space")
    out = np.empty((K + 1, x.size))
    out[0] = x
    exit_step = None
    for k in range(K):
        x = np.asarray(system.f(k, x), dtype=float)
        if not np.all(np.isfinite(x)):
            raise SimulationError(f"non-finite state at step {k + 1}")
        out[k + 1] = x
        if exit_step is None and not system.contains(x):
            exit_step = k + 1
    return Trajectory(out, system.name, exit_step)


def jacobian_fd_error(system, k, x, h=1e-6):
    """Max relative gap between ``system.jacobian`` and central differences."""
    x = as_vector(x)
    J = np.asarray(system.jacobian(k, x))
    fd = np.empty_like(J)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        fd[:, j] = (system.f(k, x + e) - system.f(k, x - e)) / (2 * h)
    return float(np.max(np.abs(J - fd)) / max(1.0, np.max(np.abs(J))))


# -- tridiagonal Euler systems ------------------------------------------------

@dataclass
class EdistReport:
    ok: bool
    eps_max: float
    eps_dominance: float
    eps_singular: float
    eps: Optional[float]
    points: int
    witness: Optional[dict] = None

    def to_dict(self):
        return {"ok": self.ok, "eps_max": self.eps_max, "eps_dominance": self.eps_dominance,
                "eps_singular": self.eps_singular, "eps": self.eps,
                "points": self.points, "witness": self.witness}


def _cell_centres(lower, upper, grid):
    axes = [lo + (np.arange(grid) + 0.5) * (hi - lo) / grid for lo, hi in zip(lower, upper)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lower))


def lemma_edist_epsilon(system, grid=5, tol=DEFAULT_TOL, lower=None, upper=None):
    """Check the tridiagonal structure of ``I + eps * dfield`` and bound eps.

    Samples cell centres of a ``grid**n`` partition of Omega (interior points)
    for every k in one period.  The field Jacobian must be tridiagonal with
    positive off-diagonals.  ``eps_dominance`` is the largest eps keeping the
    row dominance condition at every sample; ``eps_singular`` the smallest
    eps making some sample singular.  ``ok`` means the system's own eps lies
    below both, so every sampled Jacobian is oscillatory.
    """
    if system.field_jacobian is None:
        raise ValueError("system was not built by euler_discretize")
    lower = system.lower if lower is None else np.asarray(lower, float)
    upper = system.upper if upper is None else np.asarray(upper, float)
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("lemma check needs a bounded box; pass lower/upper")
    pts = _cell_centres(lower, upper, grid)
    eps_dom = np.inf
    eps_sing = np.inf
    n = system.dim
    i, j = np.indices((n, n))
    off_band = np.abs(i - j) > 1
    for k in range(system.period):
        for a in pts:
            L = np.asarray(system.field_jacobian(k, a), dtype=float)
            sup, sub = np.diag(L, 1), np.diag(L, -1)
            if np.any(np.abs(L[off_band]) > tol.zero_eps) or np.any(sup <= tol.zero_eps) \
                    or np.any(sub <= tol.zero_eps):
                return EdistReport(False, 0.0, 0.0, 0.0, system.eps, len(pts),
                                   {"k": k, "a": a.tolist(), "jacobian": L.tolist()})
            slack = np.append(sup, 0.0) + np.insert(sub, 0, 0.0) - np.diag(L)
            pos = slack > 0
            if np.any(pos):
                eps_dom = min(eps_dom, float(np.min(1.0 / slack[pos])))
            lam = np.linalg.eigvals(L).real
            neg = lam < 0
            if np.any(neg):
                eps_sing = min(eps_sing, float(np.min(-1.0 / lam[neg])))
    eps_max = min(eps_dom, eps_sing)
    ok = system.eps is not None and system.eps <= eps_dom and system.eps < eps_sing
    return EdistReport(bool(ok), eps_max, eps_dom, eps_sing, system.eps, len(pts))


# -- ODTS order certificates -------------------------------------------------

@dataclass
class OdtsCertificate:
    order_h: int
    samples_checked: int
    method: str
    verdict: Verdict
    all_f_tp: bool
    counterexample: Optional[dict] = None
    sampled: bool = True

    def to_dict(self):
        return {"order_h": self.order_h, "samples_checked": self.samples_checked,
                "method": self.method, "verdict": self.verdict.value,
                "all_F_TP": self.all_f_tp, "counterexample": self.counterexample,
                "sampled": self.sampled}


def line_integral_F(system, k, a, b, q=DEFAULT_QUAD):
    """F(k, a, b), in closed form when the system has scalar nonlinearities."""
    form = system.scalar_form
    if form is not None:
        return closed_form_F(form.C(k), form.fs, form.dfs, a, b, form.dds)
    return F_segment(system.jacobian, k, a, b, q)


def _balanced(A):
    """Row then column scaling to unit max-abs.

    Positive diagonal scalings keep the sign of every minor, so the TP and
    oscillatory verdicts are unchanged in exact arithmetic, while the
    absolute thresholds of the tolerance become relative to the matrix scale.
    """
    r = np.max(np.abs(A), axis=1, keepdims=True)
    A = np.divide(A, r, out=A.copy(), where=r > 0)
    c = np.max(np.abs(A), axis=0, keepdims=True)
    return np.divide(A, c, out=A.copy(), where=c > 0)


def certify_odts_order(system, h, trials=50, q=DEFAULT_QUAD, tol=DEFAULT_TOL, rng=None,
                       lower=None, upper=None):
    """Sampled certificate that ``z(k+1) = F(k, ., .) z(k)`` is an ODTS of order h.

    Each trial draws times ``k_1 < ... < k_h`` from one window of length
    h*T and independent pairs (a_i, b_i) in Omega, then requires every F to
    be oscillatory (TP when h = 1) and the product ``F_h ... F_1`` to be TP.
    Matrices are balanced by positive diagonal scaling before classification.
    """
    if h < 1:
        raise ValueError("order h must be >= 1")
    rng = make_rng(rng)
    lower = system.lower if lower is None else np.asarray(lower, float)
    upper = system.upper if upper is None else np.asarray(upper, float)
    n = system.dim
    if system.scalar_form is not None:
        method = "ClosedForm"
    elif h == n - 1 and h > 1:
        method = "Oscillatory+Bound"
    else:
        method = "Direct"
    window = max(h * system.period, h)
    all_f_tp = True
    worst = Verdict.YES
    counterexample = None
    for trial in range(trials):
        ks = np.sort(rng.choice(window, size=h, replace=False))
        prod = np.eye(n)
        failed = None
        for k in ks:
            a = lower + (upper - lower) * rng.random(n)
            b = lower + (upper - lower) * rng.random(n)
            F = line_integral_F(system, int(k), a, b, q)
            Fb = _balanced(F)
            tp = classify_tp(Fb, tol).verdict
            all_f_tp &= tp is Verdict.YES
            v = tp if h == 1 else classify_oscillatory(Fb, tol).verdict
            if v is not Verdict.YES and failed is None:
                failed = (v, {"trial": trial, "k": int(k), "a": a.tolist(), "b": b.tolist(),
                              "check": "F TP" if h == 1 else "F oscillatory", "F": F.tolist()})
            prod = F @ prod
        if failed is None:
            v = classify_tp(_balanced(prod), tol).verdict
            if v is not Verdict.YES:
                failed = (v, {"trial": trial, "ks": ks.tolist(), "check": "product TP",
                              "product": prod.tolist()})
        if failed is not None:
            if counterexample is None or (failed[0] is Verdict.NO and worst is not Verdict.NO):
                counterexample = failed[1]
            if failed[0] is Verdict.NO:
                worst = Verdict.NO
            elif worst is Verdict.YES:
                worst = Verdict.INCONCLUSIVE
    return OdtsCertificate(h, trials, method, worst, bool(all_f_tp), counterexample)


# -- variational equation ----------------------------------------------------

@dataclass
class VariationalRun:
    z: np.ndarray               # (K + 1, n)
    M: list                     # K matrices
    s_minus: np.ndarray
    s_plus: np.ndarray
    identity_residual: float    # max_k |z(k+1) - M(k) z(k)| / max(1, |x(k+1)|)
    resolved: int               # z(k) is above roundoff for k < resolved

    def chain_holds(self, u=1):
        """Sign-variation chain over the subsamples ju that are still resolved."""
        stop = self.resolved
        return sign_chain_holds(self.s_minus[:stop], self.s_plus[:stop], u)

    def window_products_tp(self, u, h, tol=DEFAULT_TOL):
        """Verdict per full window: is ``M(ju+u-1) ... M(ju)`` TP?

        Long products are nearly rank one, so their higher minors underflow
        any absolute threshold.  Instead: the first h factors must have a TP
        product and every remaining factor must be TN and nonsingular, since
        a nonsingular TN matrix times a TP matrix is TP.
        """
        out = []
        stop = min(len(self.M), self.resolved - 1)
        for start in range(0, stop - u + 1, u):
            Ms = self.M[start:start + u]
            head = np.eye(self.z.shape[1])
            for F in Ms[:h]:
                head = F @ head
            v = classify_tp(_balanced(head), tol).verdict
            for F in Ms[h:]:
                if v is not Verdict.YES:
                    break
                Fb = _balanced(F)
                if classify_tn(Fb, tol).verdict is not Verdict.YES:
                    v = Verdict.INCONCLUSIVE
                elif abs(np.linalg.det(Fb)) <= tol.pos_eps:
                    v = Verdict.INCONCLUSIVE
            out.append(v)
        return out

    def subsampled_products(self, u):
        """Products M((j+1)u - 1) ... M(ju) for every full window of length u."""
        out = []
        for start in range(0, len(self.M) - u + 1, u):
            P = np.eye(self.z.shape[1])
            for k in range(start, start + u):
                P = self.M[k] @ P
            out.append(P)
        return out


def variational_run(system, a, b, K, q=DEFAULT_QUAD, tol=DEFAULT_TOL):
    """Trajectories from a and b, their difference z(k) and the matrices M(k).

    Sign counts are taken on ``z(k) / max|z(k)|`` so that the decay of z
    does not push entries under the zero threshold.  Once ``|z(k)|`` falls
    to roundoff level relative to the states the signs of z carry no
    information; ``resolved`` marks the first such k.
    """
    a, b = as_vector(a, "a"), as_vector(b, "b")
    if np.array_equal(a, b):
        raise ValueError("variational_run needs a != b")
    xa = simulate(system, a, K).states
    xb = simulate(system, b, K).states
    z = xb - xa
    M = [variational_matrix(system, k, xa[k], xb[k], q) for k in range(K)]
    scale = np.maximum(1.0, np.maximum(np.max(np.abs(xa), axis=1), np.max(np.abs(xb), axis=1)))
    small = np.flatnonzero(np.max(np.abs(z), axis=1) <= 1e-12 * scale)
    resolved = int(small[0]) if small.size else K + 1
    resid = 0.0
    for k in range(K):
        resid = max(resid, float(np.max(np.abs(z[k + 1] - M[k] @ z[k])) / scale[k + 1]))
    norms = np.max(np.abs(z), axis=1, keepdims=True)
    zn = np.divide(z, norms, out=np.zeros_like(z), where=norms > 0)
    sm, sp = sign_counts(zn, tol)
    return VariationalRun(z, M, np.asarray(sm), np.asarray(sp), resid, resolved)


def sign_chain_holds(s_minus, s_plus, u=1):
    """``s_plus(z((j+1)u)) <= s_minus(z(ju)) <= s_plus(z(ju))`` along the subsamples."""
    sm, sp = np.asarray(s_minus)[::u], np.asarray(s_plus)[::u]
    return bool(np.all(sm <= sp) and np.all(sp[1:] <= sm[:-1]))


def eventual_monotonicity_check(v1, window=1):
    """Smallest m after which v1 keeps one strict sign, or None.

    None is returned when the final constant-sign run is shorter than
    ``window`` or the sequence ends on a zero.
    """
    s = np.sign(np.asarray(v1, dtype=float))
    if s.size == 0 or s[-1] == 0:
        return None
    m = len(s) - 1
    while m > 0 and s[m - 1] == s[-1]:
        m -= 1
    if len(s) - m < window:
        return None
    return int(m)


# -- period detection --------------------------------------------------------

@dataclass
class PeriodReport:
    detected_period: Optional[int]
    residual: float
    burn_in: int
    candidate_u: int
    window: int
    residuals: dict = field(default_factory=dict)
    limit_cycle: Optional[np.ndarray] = None

    def to_dict(self):
        return {"detected_period": self.detected_period, "residual": self.residual,
                "burn_in": self.burn_in, "candidate_u": self.candidate_u,
                "window": self.window,
                "residuals": {str(d): r for d, r in self.residuals.items()},
                "limit_cycle": None if self.limit_cycle is None else self.limit_cycle.tolist()}


def divisors(u):
    return [d for d in range(1, u + 1) if u % d == 0]


def detect_period(traj, candidate_u, res_tol=1e-6, window=None):
    """Smallest divisor d of candidate_u with ``sup |x(k+d) - x(k)| < res_tol``.

    The sup runs over the last ``window`` admissible k (default: candidate_u)
    of the trajectory; everything before is burn-in.
    """
    X = traj.states if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    window = candidate_u if window is None else window
    if candidate_u < 1 or window < 1:
        raise ValueError("candidate_u and window must be positive")
    if len(X) < candidate_u + window:
        raise ValueError(f"trajectory of {len(X)} states is too short for u={candidate_u} "
                         f"and window={window}")
    K = len(X) - 1
    residuals = {}
    detected = None
    for d in divisors(candidate_u):
        ks = np.arange(K - d - window + 1, K - d + 1)
        r = float(np.max(np.abs(X[ks + d] - X[ks])))
        residuals[d] = r
        if detected is None and r < res_tol:
            detected = d
    burn_in = K - candidate_u - window + 1
    residual = residuals[detected if detected is not None else candidate_u]
    return PeriodReport(detected, residual, burn_in, candidate_u, window, residuals,
                        X[-candidate_u:].copy())


# -- invariance ---------------------------------------------------------------

@dataclass
class ProbeReport:
    samples: int
    exits: int
    first_exit: Optional[dict] = None

    def to_dict(self):
        return {"samples": self.samples, "exits": self.exits, "first_exit": self.first_exit}


def invariant_set_probe(system, samples=10_000, rng=None, lower=None, upper=None):
    """One step from uniform random points of a box; count landings outside it."""
    rng = make_rng(rng)
    lower = system.lower if lower is None else np.asarray(lower, float)
    upper = system.upper if upper is None else np.asarray(upper, float)
    exits = 0
    first = None
    for _ in range(samples):
        x = lower + (upper - lower) * rng.random(system.dim)
        k = int(rng.integers(system.period))
        y = np.asarray(system.f(k, x), dtype=float)
        if np.any(y < lower - 1e-12) or np.any(y > upper + 1e-12):
            exits += 1
            if first is None:
                first = {"k": k, "x": x.tolist(), "next": y.tolist()}
    return ProbeReport(samples, exits, first)
