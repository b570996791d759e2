"""Discrete-time systems and the registry that builds them from JSON parameters.

Each builder returns a :class:`DiscreteSystem`.  Parameter dictionaries
mirror the JSON files accepted by ``oscidyn simulate --params``; every key
is optional and defaults to the values used by the reproduction runs.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Wave:
    """``base + amp * sin|cos(2 pi k / period + phase)`` at integer k."""
    base: float = 0.0
    amp: float = 0.0
    period: int = 1
    phase: float = 0.0
    wave: str = "sin"

    def __call__(self, k):
        if self.amp == 0.0:
            return self.base
        fn = math.sin if self.wave == "sin" else math.cos
        return self.base + self.amp * fn(2 * math.pi * k / self.period + self.phase)

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, (int, float)):
            return cls(base=float(obj))
        if obj.get("wave", "sin") not in ("sin", "cos"):
            raise ValueError(f"unknown wave {obj['wave']!r}")
        return cls(float(obj.get("base", 0.0)), float(obj.get("amp", 0.0)),
                   int(obj.get("period", 1)), float(obj.get("phase", 0.0)),
                   obj.get("wave", "sin"))

    def to_json(self):
        return {"base": self.base, "amp": self.amp, "period": self.period,
                "phase": self.phase, "wave": self.wave}


@dataclass
class ScalarForm:
    """x(k+1) = C(k) [f_1(x_1), ..., f_n(x_n)]: enough for closed-form line integrals."""
    C: Callable
    fs: list
    dfs: list
    dds: Optional[list] = None      # exact divided differences, where known


@dataclass
class DiscreteSystem:
    name: str
    dim: int
    period: int
    f: Callable                 # (k, x) -> x(k+1)
    jacobian: Callable          # (k, x) -> (n, n) array
    lower: np.ndarray
    upper: np.ndarray
    params: dict = field(default_factory=dict)
    # set by euler_discretize
    vector_field: Optional[Callable] = None
    field_jacobian: Optional[Callable] = None
    eps: Optional[float] = None
    scalar_form: Optional[ScalarForm] = None

    def contains(self, x, slack=1e-12):
        return bool(np.all(x >= self.lower - slack) and np.all(x <= self.upper + slack))

    def sample(self, rng, size=None):
        shape = (self.dim,) if size is None else (size, self.dim)
        return self.lower + (self.upper - self.lower) * rng.random(shape)


def _box(omega, n):
    box = np.asarray(omega, dtype=float)
    if box.shape == (2,):
        box = np.tile(box, (n, 1))
    if box.shape != (n, 2) or np.any(box[:, 0] > box[:, 1]):
        raise ValueError(f"omega must be {n} [lower, upper] pairs")
    return box[:, 0].copy(), box[:, 1].copy()


def euler_discretize(field_fn, field_jac, eps, *, dim=None, name="euler", period=1,
                     omega=None, params=None):
    """``x(k+1) = x(k) + eps * field(k, x(k))`` with Jacobian ``I + eps * dfield``.

    Without ``omega`` the state space is unbounded and ``dim`` is required.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if omega is None:
        if dim is None:
            raise ValueError("euler_discretize needs omega or dim")
        lower, upper = np.full(dim, -np.inf), np.full(dim, np.inf)
    else:
        lower, upper = _box(omega, len(omega))

    def f(k, x):
        return x + eps * np.asarray(field_fn(k, x), dtype=float)

    def jac(k, x):
        Jf = np.asarray(field_jac(k, x), dtype=float)
        return np.eye(Jf.shape[0]) + eps * Jf

    return DiscreteSystem(name, len(lower), period, f, jac, lower, upper, dict(params or {}),
                          vector_field=field_fn, field_jacobian=field_jac, eps=float(eps))


# -- phosphorelay -----------------------------------------------------------

PHOSPHORELAY_DEFAULTS = {
    "n": 4, "eps": 0.1,
    "eta": [1.0, 1.0, 1.0, 1.0],
    "xi": [3.0, 3.0, 3.0],
    "p": [0.8, 2.0, 2.0, 2.0],
    "stimulus": {"base": 3.0, "amp": 1.0, "period": 8, "phase": 0.0, "wave": "sin"},
}


def phosphorelay(params=None):
    """Euler-discretised phosphorelay chain driven by a periodic stimulus c(k).

    ``eta`` has n entries (the last one drains x_n), ``xi`` has n-1 entries
    and the state space is the box prod [0, p_i].
    """
    prm = {**PHOSPHORELAY_DEFAULTS, **(params or {})}
    n = int(prm["n"])
    eta = np.asarray(prm["eta"], dtype=float)
    xi = np.asarray(prm["xi"], dtype=float)
    p = np.asarray(prm["p"], dtype=float)
    if eta.shape != (n,) or xi.shape != (n - 1,) or p.shape != (n,):
        raise ValueError("phosphorelay needs len(eta) = len(p) = n and len(xi) = n - 1")
    if np.any(eta <= 0) or np.any(xi <= 0) or np.any(p <= 0):
        raise ValueError("phosphorelay rates and totals must be positive")
    stim = Wave.from_json(prm["stimulus"])

    def field_fn(k, x):
        flux = eta[:-1] * x[:-1] * (p[1:] - x[1:])
        dx = np.empty(n)
        dx[0] = (p[0] - x[0]) * stim(k) - flux[0] - xi[0] * x[0]
        dx[1:-1] = flux[:-1] - flux[1:] - xi[1:] * x[1:-1]
        dx[-1] = flux[-1] - eta[-1] * x[-1]
        return dx

    def field_jac(k, x):
        J = np.zeros((n, n))
        sub = eta[:-1] * (p[1:] - x[1:])
        sup = eta[:-1] * x[:-1]
        J[np.arange(1, n), np.arange(n - 1)] = sub
        J[np.arange(n - 1), np.arange(1, n)] = sup
        diag = np.zeros(n)
        diag[0] = -stim(k) - sub[0] - xi[0]
        diag[1:-1] = -sup[:-1] - sub[1:] - xi[1:]
        diag[-1] = -sup[-1] - eta[-1]
        J[np.arange(n), np.arange(n)] = diag
        return J

    omega = np.stack([np.zeros(n), p], axis=1)
    return euler_discretize(field_fn, field_jac, float(prm["eps"]), name="phosphorelay",
                            period=stim.period, omega=omega, params=_plain(prm))


# -- tanh network -----------------------------------------------------------

TANH_DEFAULTS = {
    "C": [[{"base": 2.0, "amp": 1.0, "period": 2, "phase": 0.5, "wave": "cos"},
           {"base": 2.0, "amp": -1.0, "period": 4, "phase": 1.5, "wave": "sin"}],
          [0.5,
           {"base": 3.0, "amp": 1.0, "period": 6, "phase": 2.0, "wave": "cos"}]],
    "omega": [[1.0, 8.0], [1.0, 8.0]],
}


def _sech2(y):
    return 1.0 / np.cosh(y) ** 2


def tanh_divided_difference(a, b):
    """(tanh a - tanh b)/(a - b) without cancellation near saturation."""
    h = a - b
    ratio = 1.0 if h == 0 else math.sinh(h) / h
    return ratio / (math.cosh(a) * math.cosh(b))


def tanh_network(params=None):
    """``x(k+1) = C(k) tanh(x(k))`` with periodic entries c_ij(k)."""
    prm = {**TANH_DEFAULTS, **(params or {})}
    waves = [[Wave.from_json(c) for c in row] for row in prm["C"]]
    n = len(waves)
    if any(len(row) != n for row in waves):
        raise ValueError("C must be square")
    period = math.lcm(*[w.period for row in waves for w in row])

    def C(k):
        return np.array([[w(k) for w in row] for row in waves])

    def f(k, x):
        return C(k) @ np.tanh(x)

    def jac(k, x):
        return C(k) * _sech2(x)[None, :]

    lower, upper = _box(prm["omega"], n)
    form = ScalarForm(C, [math.tanh] * n, [lambda y: 1.0 / math.cosh(y) ** 2] * n,
                      [tanh_divided_difference] * n)
    return DiscreteSystem("tanh_network", n, period, f, jac, lower, upper, _plain(prm),
                          scalar_form=form)


# -- perturbed chain --------------------------------------------------------

def chain_matrix(n=3, scale=0.65):
    """scale * exp(-(i - j)^2): TP for any n (Gaussian kernel on integer nodes)."""
    i, j = np.indices((n, n))
    return scale * np.exp(-((i - j) ** 2).astype(float))


PERTURBED_DEFAULTS = {
    "A": chain_matrix().tolist(),
    "eps": 0.0118,
    "target": 1, "source": 3,
    "gain": {"base": 50.0, "amp": 50.0, "period": 10, "phase": 0.0, "wave": "sin"},
    "omega": [[0.0, 1.0]] * 3,
}


def perturbed_chain(params=None):
    """``x(k+1) = A x(k) + eps * tanh(gain(k) x_source(k)) e_target`` (1-based indices)."""
    prm = {**PERTURBED_DEFAULTS, **(params or {})}
    A = np.asarray(prm["A"], dtype=float)
    n = A.shape[0]
    eps = float(prm["eps"])
    t, s = int(prm["target"]) - 1, int(prm["source"]) - 1
    if not (0 <= t < n and 0 <= s < n):
        raise ValueError("target/source out of range")
    gain = Wave.from_json(prm["gain"])

    def f(k, x):
        out = A @ x
        out[t] += eps * math.tanh(gain(k) * x[s])
        return out

    def jac(k, x):
        J = A.copy()
        g = gain(k)
        J[t, s] += eps * g / math.cosh(g * x[s]) ** 2
        return J

    lower, upper = _box(prm["omega"], n)
    return DiscreteSystem("perturbed_chain", n, gain.period, f, jac, lower, upper, _plain(prm),
                          eps=eps)


# -- linear models ----------------------------------------------------------

def tridiagonal_coupling(n=3):
    """Zero diagonal, ones on both off-diagonals."""
    return np.eye(n, k=1) + np.eye(n, k=-1)


EULER_LINEAR_DEFAULTS = {"L": tridiagonal_coupling().tolist(), "eps": 0.3,
                         "omega": [[-1e6, 1e6]] * 3}


def euler_linear(params=None):
    """Euler discretisation of ``x' = L x``: ``x(k+1) = (I + eps L) x(k)``."""
    prm = {**EULER_LINEAR_DEFAULTS, **(params or {})}
    L = np.asarray(prm["L"], dtype=float)
    omega = prm["omega"] if len(prm["omega"]) == L.shape[0] else [prm["omega"][0]] * L.shape[0]
    return euler_discretize(lambda k, x: L @ x, lambda k, x: L, float(prm["eps"]),
                            name="euler_linear", period=1, omega=omega, params=_plain(prm))


LINEAR_TV_DEFAULTS = {"A": [[[0.2, 0.1, 0.0], [9.0, 11.0, 1.0], [0.0, 1.0, 3.0]]],
                      "omega": [[-1e6, 1e6]] * 3}


def linear_tv(params=None):
    """``x(k+1) = A(k mod T) x(k)`` for a list of T matrices."""
    prm = {**LINEAR_TV_DEFAULTS, **(params or {})}
    mats = [np.asarray(M, dtype=float) for M in prm["A"]]
    n = mats[0].shape[0]
    T = len(mats)

    def f(k, x):
        return mats[k % T] @ x

    def jac(k, x):
        return mats[k % T]

    omega = prm["omega"] if len(prm["omega"]) == n else [prm["omega"][0]] * n
    lower, upper = _box(omega, n)
    return DiscreteSystem("linear_tv", n, T, f, jac, lower, upper, _plain(prm))


def _plain(prm):
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in prm.items()}


REGISTRY = {
    "phosphorelay": phosphorelay,
    "tanh_network": tanh_network,
    "perturbed_chain": perturbed_chain,
    "euler_linear": euler_linear,
    "linear_tv": linear_tv,
}


def build_model(name, params=None):
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {sorted(REGISTRY)}") from None
    return builder(params)
