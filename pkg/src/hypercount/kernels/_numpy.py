"""Pure-numpy fallback kernels.

Same contracts as :mod:`hypercount.kernels._jit`, vectorized over batches of
points instead of compiled loops.  Used when numba is unavailable or
``HYPERCOUNT_NO_JIT=1``; the test suite runs both and compares.
"""
import numpy as np

from . import layout as L

CHUNK = 1 << 15


def det_batch(mats, t):
    """Determinants of a stack of square matrices over the field of ``t``."""
    M = np.array(mats, dtype=np.int64, copy=True)
    N, n, _ = M.shape
    det = np.ones(N, dtype=np.int64)
    rows = np.arange(N)
    for c in range(n):
        nz = M[:, c:, c] != 0
        piv = c + nz.argmax(axis=1)
        swap = piv != c
        if swap.any():
            top = M[rows, c, :].copy()
            M[rows, c, :] = M[rows, piv, :]
            M[rows, piv, :] = top
            det = np.where(swap, t.neg[det], det)
        pv = M[:, c, c]
        # a column with no pivot leaves pv = 0, which zeroes det for good
        det = t.mul[det, pv]
        if c + 1 == n:
            break
        f = t.mul[M[:, c + 1:, c], t.inv[pv][:, None]]
        prod = t.mul[f[:, :, None], M[:, None, c, c + 1:]]
        M[:, c + 1:, c + 1:] = t.sub[M[:, c + 1:, c + 1:], prod]
    return det


def build(X, m, terms, t):
    ti, tj, tv, tc = terms
    M = np.zeros((X.shape[0], m, m), dtype=np.int64)
    for i, j, v, c in zip(ti, tj, tv, tc):
        M[:, i, j] = t.add[M[:, i, j], t.mul[c, X[:, v]]]
    return M


def _grid(q, n, start, stop):
    """Rows of F_q^n (as indices) for flat positions start..stop-1, last digit fastest."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, n), dtype=np.int64)
    for pos in range(n - 1, -1, -1):
        out[:, pos] = idx % q
        idx //= q
    return out


def pencil_dets(points, m, terms, t):
    points = np.asarray(points, dtype=np.int64)
    out = np.empty(points.shape[0], dtype=np.int64)
    for s in range(0, points.shape[0], CHUNK):
        chunk = points[s:s + CHUNK]
        out[s:s + CHUNK] = det_batch(build(chunk, m, terms, t), t)
    return out


def count_pencil_zeros(m, n_vars, terms, t):
    total = t.q**n_vars
    zeros = 0
    for s in range(0, total, CHUNK):
        X = _grid(t.q, n_vars, s, min(total, s + CHUNK))
        zeros += int(np.count_nonzero(det_batch(build(X, m, terms, t), t) == 0))
    return zeros


# -- XStrip stratified counting ---------------------------------------------

def _free_points(q, free, fixed, start, stop):
    X = np.zeros((stop - start, L.N_VARS), dtype=np.int64)
    X[:, list(free)] = _grid(q, len(free), start, stop)
    for var, val in fixed.items():
        X[:, var] = val
    return X


def _g5(X, terms, t):
    X = X.copy()
    X[:, L.B1] = 0
    return t.neg[det_batch(build(X, 7, terms, t)[:, 1:, 1:], t)]


def _g6_tilde_parts(X, terms, t):
    """(G~6^1, G~6^2) for rows of X with A0 = B0 = 0."""
    X = X.copy()
    X[:, L.B1] = 0
    d0 = det_batch(build(X, 7, terms, t), t)
    X[:, L.B1] = 1
    d1 = det_batch(build(X, 7, terms, t), t)
    return t.sub[d0, d1], t.neg[d0]


def _expand(X, var, q):
    Y = np.repeat(X, q, axis=0)
    Y[:, var] = np.tile(np.arange(q), X.shape[0])
    return Y


def _tally(X, terms, t):
    """(N_Y, N_Z) contributions of rows already known to satisfy I5 = G5 = 0."""
    if not len(X):
        return 0, 0
    g61, g62 = _g6_tilde_parts(X, terms, t)
    y = g61 == 0
    return int(np.count_nonzero(y)), int(np.count_nonzero(y & (g62 == 0)))


def _a2_loop(X, q, terms, t):
    Y = _expand(X, L.A2, q)
    return _tally(Y[_g5(Y, terms, t) == 0], terms, t)


def _quad_roots(c0, c1, c2, t, qcount, qroots):
    n = np.full(c0.shape, -1, dtype=np.int64)
    quad = c2 != 0
    ic = t.inv[c2]
    b = t.mul[c1, ic]
    c = t.mul[c0, ic]
    n = np.where(quad, qcount[b, c], n)
    r0 = np.where(quad, qroots[b, c, 0], 0)
    r1 = np.where(quad, qroots[b, c, 1], 0)
    lin = ~quad & (c1 != 0)
    n = np.where(lin, 1, n)
    r0 = np.where(lin, t.mul[t.neg[c0], t.inv[c1]], r0)
    n = np.where(~quad & (c1 == 0) & (c0 != 0), 0, n)
    return n, r0, r1


def _interp3(f0, f1, f2, t):
    tt = 2
    den = t.inv[t.sub[t.mul[tt, tt], tt]]
    d1 = t.sub[f1, f0]
    dt = t.sub[f2, f0]
    c2 = t.mul[t.sub[dt, t.mul[tt, d1]], den]
    return f0, t.sub[d1, c2], c2


def _peval(c, r, t):
    return t.add[c[0], t.mul[r, t.add[c[1], t.mul[c[2], r]]]]


def _at_a2(X, a2):
    Y = X.copy()
    Y[:, L.A2] = a2
    return Y


def _a2_sampled(X, q, terms, t, qcount, qroots):
    g = [_g5(_at_a2(X, s), terms, t) for s in range(3)]
    n, r0, r1 = _quad_roots(*_interp3(*g, t), t, qcount, qroots)
    ny = nz = 0
    for i, r in enumerate((r0, r1)):
        rows = n > i
        dy, dz = _tally(_at_a2(X[rows], r[rows]), terms, t)
        ny += dy
        nz += dz
    # rows where G5 vanishes identically in a2
    Xz = X[n < 0]
    if not len(Xz):
        return ny, nz
    h = [_g6_tilde_parts(_at_a2(Xz, s), terms, t) for s in range(3)]
    u = _interp3(h[0][0], h[1][0], h[2][0], t)
    v = _interp3(h[0][1], h[1][1], h[2][1], t)
    n1, s0, s1 = _quad_roots(*u, t, qcount, qroots)
    n2, _, _ = _quad_roots(*v, t, qcount, qroots)
    free = n1 < 0
    ny += int(np.where(free, q, n1).sum())
    nz += int(np.where(free & (n2 < 0), q, np.where(free, n2, 0)).sum())
    for i, r in enumerate((s0, s1)):
        nz += int(np.count_nonzero(~free & (n1 > i) & (_peval(v, r, t) == 0)))
    return ny, nz


def xstrip_shard(mode, a1, a3, terms, t, qcount=None, qroots=None):
    q = t.q
    free = L.BASELINE_FREE if mode == "baseline" else L.ACCELERATED_FREE
    total = q ** len(free)
    ny = nz = 0
    for s in range(0, total, CHUNK):
        X = _free_points(q, free, {L.A1: a1, L.A3: a3}, s, min(total, s + CHUNK))
        M = build(X, 7, terms, t)
        if mode == "baseline":
            i5 = det_batch(M[:, 2:, 2:], t)
            Xs = X[i5 == 0]
        else:
            i4 = det_batch(M[:, 3:, 3:], t)
            g4 = t.neg[det_batch(M[:, 2:, 2:], t)]
            unique = X[i4 != 0]
            unique[:, L.B2] = t.mul[g4[i4 != 0], t.inv[i4[i4 != 0]]]
            degenerate = _expand(X[(i4 == 0) & (g4 == 0)], L.B2, q)
            Xs = np.concatenate([unique, degenerate])
        if not len(Xs):
            continue
        # F_2 has too few points to sample a quadratic, so loop a2 there
        if mode == "baseline" or q == 2:
            dy, dz = _a2_loop(Xs, q, terms, t)
        else:
            dy, dz = _a2_sampled(Xs, q, terms, t, qcount, qroots)
        ny += dy
        nz += dz
    return ny, nz


def xstrip_midform(terms, t):
    q = t.q
    free = L.MIDFORM_FREE
    total = q ** len(free)
    n_v5 = n_w = 0
    for s in range(0, total, CHUNK):
        X = _free_points(q, free, {}, s, min(total, s + CHUNK))
        M = build(X, 7, terms, t)
        keep = det_batch(M[:, 2:, 2:], t) == 0
        X = X[keep]
        n_v5 += int(np.count_nonzero(det_batch(M[keep][:, 1:, 1:], t) == 0))
        Y = _expand(X, L.B1, q)
        MY = build(Y, 7, terms, t)
        w = (det_batch(MY[:, 1:, 1:], t) == 0) & (det_batch(MY, t) == 0)
        n_w += int(np.count_nonzero(w))
    return n_v5, n_w
