"""Randomized sources of structured matrices for property checks."""
import numpy as np

from ._config import make_rng


def increasing_nodes(n, rng, gap=0.3):
    """n centred nodes with consecutive spacing in [gap, 2*gap)."""
    x = np.cumsum(gap + gap * rng.random(n))
    return x - x.mean()


def gaussian_kernel_tp(n, rng=None, m=None, gap=0.3):
    """TP matrix K_ij = exp(-(x_i - y_j)^2) for strictly increasing x, y.

    The default spacing keeps every minor above ~1e-6 for n <= 6, so the
    result is TP under the default tolerance and not merely in exact
    arithmetic.
    """
    rng = make_rng(rng)
    m = n if m is None else m
    x = increasing_nodes(n, rng, gap)
    y = increasing_nodes(m, rng, gap)
    return np.exp(-np.subtract.outer(x, y) ** 2)


def moment_hankel(n, rng=None, support=None):
    """Hankel matrix [m_{i+j}] of moments of a discrete positive measure.

    The measure has ``support >= n`` atoms at 0 < x_1 < ... with positive
    weights, which makes the moment matrix TP.
    """
    rng = make_rng(rng)
    support = n if support is None else support
    if support < n:
        raise ValueError("need at least n support points")
    atoms = np.cumsum(0.2 + 0.6 * rng.random(support))
    weights = 0.5 + rng.random(support)
    moments = np.array([np.sum(weights * atoms ** j) for j in range(2 * n - 1)])
    i, j = np.indices((n, n))
    return moments[i + j]


def dominant_tridiagonal(n, rng=None, slack=0.1, positive_offdiag=True):
    """Nonnegative tridiagonal matrix satisfying the row dominance condition."""
    rng = make_rng(rng)
    lo = 0.05 if positive_offdiag else 0.0
    sup = lo + rng.random(n - 1)
    sub = lo + rng.random(n - 1)
    row = np.append(sup, 0.0) + np.insert(sub, 0, 0.0)
    diag = row + slack + rng.random(n)
    return np.diag(diag) + np.diag(sup, 1) + np.diag(sub, -1)


def checkerboard_signs(n, m=None):
    m = n if m is None else m
    i, j = np.indices((n, m))
    return np.where((i + j) % 2 == 0, 1.0, -1.0)


def bidiagonal_tn(n, rng=None, zero_prob=0.3):
    """TN matrix as a product of elementary bidiagonal factors and a positive diagonal.

    Every factor ``I + l E_{i+1,i}`` or ``I + u E_{i,i+1}`` with l, u >= 0
    is TN, and products of TN matrices are TN.  Zero parameters are drawn
    with probability ``zero_prob`` so that singular-looking structure and
    zero minors appear.
    """
    rng = make_rng(rng)
    M = np.diag(0.5 + rng.random(n))
    for _ in range(2):
        for i in range(n - 1):
            for lower in (True, False):
                c = 0.0 if rng.random() < zero_prob else rng.random() * 2
                E = np.eye(n)
                if lower:
                    E[i + 1, i] = c
                else:
                    E[i, i + 1] = c
                M = E @ M if rng.random() < 0.5 else M @ E
    return M
