"""Pure-numpy kernels (fallback path, also the reference for the jitted path)."""
import numpy as np


def det(M):
    n = M.shape[0]
    if n == 0:
        return 1.0
    if n <= 3:
        return float(_det_closed(M[None, None])[0, 0])
    # LAPACK getrf: LU with partial pivoting
    return float(np.linalg.det(M))


def _det_closed(S):
    """Closed-form determinants of a (..., r, r) stack with r <= 3."""
    r = S.shape[-1]
    if r == 1:
        return S[..., 0, 0].copy()
    if r == 2:
        return S[..., 0, 0] * S[..., 1, 1] - S[..., 0, 1] * S[..., 1, 0]
    a, b, c = S[..., 0, 0], S[..., 0, 1], S[..., 0, 2]
    d, e, f = S[..., 1, 0], S[..., 1, 1], S[..., 1, 2]
    g, h, i = S[..., 2, 0], S[..., 2, 1], S[..., 2, 2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def minor_values(A, row_combos, col_combos):
    """Minors A(rows|cols) for every pair of row/column combinations.

    ``row_combos`` is an (R, r) array of 0-based row indices; the result has
    shape (R, C) with rows and columns in the order given.
    """
    r = row_combos.shape[1]
    sub = A[row_combos[:, None, :, None], col_combos[None, :, None, :]]
    if r <= 3:
        return _det_closed(sub)
    return np.linalg.det(sub)


def sign_counts(Y, zero_eps):
    """Return (s_minus, s_plus) for every row of the 2-D array Y."""
    Y = np.atleast_2d(Y)
    m, n = Y.shape
    S = np.where(np.abs(Y) <= zero_eps, 0, np.sign(Y)).astype(np.int64)
    nz = S != 0
    pos = np.broadcast_to(np.arange(n), (m, n))
    last = np.maximum.accumulate(np.where(nz, pos, -1), axis=1)
    # index of the previous nonzero entry strictly before column j
    prev = np.full((m, n), -1, dtype=np.int64)
    prev[:, 1:] = last[:, :-1]
    has_prev = nz & (prev >= 0)
    prev_sign = np.take_along_axis(S, np.maximum(prev, 0), axis=1)
    differ = (has_prev & (prev_sign != S)).astype(np.int64)
    s_minus = differ.sum(axis=1)

    gap = np.where(has_prev, pos - prev - 1, 0)
    steps = gap + 1
    interior = np.where(has_prev, np.where((steps - differ) % 2 == 0, steps, gap), 0)
    count_nz = nz.sum(axis=1)
    first = np.where(count_nz > 0, np.argmax(nz, axis=1), 0)
    last_nz = np.where(count_nz > 0, n - 1 - np.argmax(nz[:, ::-1], axis=1), 0)
    s_plus = interior.sum(axis=1) + first + (n - 1 - last_nz)
    s_plus = np.where(count_nz == 0, n - 1, s_plus)
    return s_minus, s_plus
