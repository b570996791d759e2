"""Numba-compiled kernels; same contracts as :mod:`oscidyn.kernels._numpy`."""
import numpy as np
from numba import njit


@njit(cache=True)
def _det_small(S, n):
    if n == 0:
        return 1.0
    if n == 1:
        return S[0, 0]
    if n == 2:
        return S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
    if n == 3:
        return (S[0, 0] * (S[1, 1] * S[2, 2] - S[1, 2] * S[2, 1])
                - S[0, 1] * (S[1, 0] * S[2, 2] - S[1, 2] * S[2, 0])
                + S[0, 2] * (S[1, 0] * S[2, 1] - S[1, 1] * S[2, 0]))
    # in-place LU with partial pivoting
    d = 1.0
    for k in range(n):
        p = k
        big = abs(S[k, k])
        for i in range(k + 1, n):
            if abs(S[i, k]) > big:
                big = abs(S[i, k])
                p = i
        if big == 0.0:
            return 0.0
        if p != k:
            for j in range(n):
                tmp = S[k, j]
                S[k, j] = S[p, j]
                S[p, j] = tmp
            d = -d
        piv = S[k, k]
        d *= piv
        for i in range(k + 1, n):
            f = S[i, k] / piv
            for j in range(k + 1, n):
                S[i, j] -= f * S[k, j]
    return d


@njit(cache=True)
def det(M):
    n = M.shape[0]
    S = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            S[i, j] = M[i, j]
    return _det_small(S, n)


@njit(cache=True)
def minor_values(A, row_combos, col_combos):
    R, r = row_combos.shape
    C = col_combos.shape[0]
    out = np.empty((R, C))
    S = np.empty((r, r))
    for a in range(R):
        for b in range(C):
            for i in range(r):
                ri = row_combos[a, i]
                for j in range(r):
                    S[i, j] = A[ri, col_combos[b, j]]
            out[a, b] = _det_small(S, r)
    return out


@njit(cache=True)
def sign_counts(Y, zero_eps):
    m, n = Y.shape
    s_minus = np.zeros(m, dtype=np.int64)
    s_plus = np.zeros(m, dtype=np.int64)
    for row in range(m):
        prev = -1
        prev_sign = 0
        sm = 0
        sp = 0
        for j in range(n):
            v = Y[row, j]
            if abs(v) <= zero_eps:
                continue
            sgn = 1 if v > 0 else -1
            if prev < 0:
                sp += j  # leading zeros each add a variation
            else:
                differ = 1 if sgn != prev_sign else 0
                sm += differ
                steps = j - prev
                if (steps - differ) % 2 == 0:
                    sp += steps
                else:
                    sp += steps - 1
            prev = j
            prev_sign = sgn
        if prev < 0:
            sp = n - 1
        else:
            sp += n - 1 - prev
        s_minus[row] = sm
        s_plus[row] = sp
    return s_minus, s_plus
