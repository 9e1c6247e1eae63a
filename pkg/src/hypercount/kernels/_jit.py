"""Numba kernels.

Field elements are canonical indices; all arithmetic goes through the
q x q tables of :class:`hypercount.ffield.FieldTables`.  A matrix whose
entries are linear forms is described by parallel ``terms`` arrays
(row, col, variable, coefficient) with the coefficient already mapped
into the field.
"""
import numpy as np
from numba import njit

from . import layout as L


@njit(cache=True)
def _det_inplace(M, n, sub, mul, neg, inv):
    det = 1
    for c in range(n):
        piv = -1
        for r in range(c, n):
            if M[r, c] != 0:
                piv = r
                break
        if piv < 0:
            return 0
        if piv != c:
            for j in range(c, n):
                t = M[c, j]
                M[c, j] = M[piv, j]
                M[piv, j] = t
            det = neg[det]
        pv = M[c, c]
        det = mul[det, pv]
        ipv = inv[pv]
        for r in range(c + 1, n):
            f = M[r, c]
            if f != 0:
                f = mul[f, ipv]
                for j in range(c + 1, n):
                    M[r, j] = sub[M[r, j], mul[f, M[c, j]]]
    return det


@njit(cache=True)
def det_batch(mats, sub, mul, neg, inv):
    n_mat = mats.shape[0]
    n = mats.shape[1]
    out = np.empty(n_mat, dtype=np.int64)
    work = np.empty((n, n), dtype=np.int64)
    for b in range(n_mat):
        for i in range(n):
            for j in range(n):
                work[i, j] = mats[b, i, j]
        out[b] = _det_inplace(work, n, sub, mul, neg, inv)
    return out


@njit(cache=True)
def _build(M, x, ti, tj, tv, tc, add, mul):
    M[:, :] = 0
    for t in range(ti.shape[0]):
        v = x[tv[t]]
        if v != 0:
            M[ti[t], tj[t]] = add[M[ti[t], tj[t]], mul[tc[t], v]]


@njit(cache=True)
def _trailing_det(M, start, W, sub, mul, neg, inv):
    n = M.shape[0] - start
    for i in range(n):
        for j in range(n):
            W[i, j] = M[start + i, start + j]
    return _det_inplace(W, n, sub, mul, neg, inv)


@njit(cache=True)
def count_pencil_zeros(m, n_vars, q, ti, tj, tv, tc, add, sub, mul, neg, inv):
    """Number of x in F_q^n_vars with det(sum_v C_v x_v) = 0."""
    x = np.zeros(n_vars, dtype=np.int64)
    M = np.zeros((m, m), dtype=np.int64)
    zeros = 0
    while True:
        _build(M, x, ti, tj, tv, tc, add, mul)
        if _det_inplace(M, m, sub, mul, neg, inv) == 0:
            zeros += 1
        pos = n_vars - 1
        while pos >= 0:
            x[pos] += 1
            if x[pos] < q:
                break
            x[pos] = 0
            pos -= 1
        if pos < 0:
            break
    return zeros


@njit(cache=True)
def pencil_dets(points, m, ti, tj, tv, tc, add, sub, mul, neg, inv):
    n_pts = points.shape[0]
    out = np.empty(n_pts, dtype=np.int64)
    M = np.zeros((m, m), dtype=np.int64)
    for b in range(n_pts):
        _build(M, points[b], ti, tj, tv, tc, add, mul)
        out[b] = _det_inplace(M, m, sub, mul, neg, inv)
    return out


# -- XStrip stratified counting ---------------------------------------------

@njit(cache=True)
def _g5(x, M, W6, ti, tj, tv, tc, add, sub, mul, neg, inv):
    """G5 = -I6|_{B1=0} at x."""
    x[L.B1] = 0
    _build(M, x, ti, tj, tv, tc, add, mul)
    return neg[_trailing_det(M, 1, W6, sub, mul, neg, inv)]


@njit(cache=True)
def _g6_tilde_parts(x, M, W7, ti, tj, tv, tc, add, sub, mul, neg, inv):
    """(G~6^1, G~6^2) at x, which must have A0 = B0 = 0."""
    x[L.B1] = 0
    _build(M, x, ti, tj, tv, tc, add, mul)
    d0 = _trailing_det(M, 0, W7, sub, mul, neg, inv)
    x[L.B1] = 1
    _build(M, x, ti, tj, tv, tc, add, mul)
    d1 = _trailing_det(M, 0, W7, sub, mul, neg, inv)
    x[L.B1] = 0
    # G~6 = -det, so G~6^1 = -d1 + d0 and G~6^2 = -d0
    return sub[d0, d1], neg[d0]


@njit(cache=True)
def _a2_loop(x, q, M, W6, W7, ti, tj, tv, tc, add, sub, mul, neg, inv):
    ny = 0
    nz = 0
    for a2 in range(q):
        x[L.A2] = a2
        if _g5(x, M, W6, ti, tj, tv, tc, add, sub, mul, neg, inv) != 0:
            continue
        g61, g62 = _g6_tilde_parts(x, M, W7, ti, tj, tv, tc, add, sub, mul, neg, inv)
        if g61 == 0:
            ny += 1
            if g62 == 0:
                nz += 1
    return ny, nz


@njit(cache=True)
def _quad_roots(c0, c1, c2, mul, neg, inv, qcount, qroots):
    """(n, r0, r1) for c2 x^2 + c1 x + c0; n = -1 when the polynomial vanishes."""
    if c2 != 0:
        ic = inv[c2]
        b = mul[c1, ic]
        c = mul[c0, ic]
        return qcount[b, c], qroots[b, c, 0], qroots[b, c, 1]
    if c1 != 0:
        return 1, mul[neg[c0], inv[c1]], 0
    if c0 != 0:
        return 0, 0, 0
    return -1, 0, 0


@njit(cache=True)
def _interp3(f0, f1, f2, add, sub, mul, inv):
    """Coefficients (c0, c1, c2) of the quadratic taking f0, f1, f2 at elements 0, 1, 2."""
    t = 2
    den = inv[sub[mul[t, t], t]]
    d1 = sub[f1, f0]
    dt = sub[f2, f0]
    c2 = mul[sub[dt, mul[t, d1]], den]
    return f0, sub[d1, c2], c2


@njit(cache=True)
def _peval(c0, c1, c2, r, add, mul):
    return add[c0, mul[r, add[c1, mul[c2, r]]]]


@njit(cache=True)
def _a2_sampled(x, q, M, W6, W7, ti, tj, tv, tc, add, sub, mul, neg, inv, qcount, qroots):
    """Tally over a2 without looping: every minor involved has degree <= 2 in A2,
    so three samples fix it and its roots come from the quadratic tables."""
    g = np.empty(3, dtype=np.int64)
    for s in range(3):
        x[L.A2] = s
        g[s] = _g5(x, M, W6, ti, tj, tv, tc, add, sub, mul, neg, inv)
    c0, c1, c2 = _interp3(g[0], g[1], g[2], add, sub, mul, inv)
    n, r0, r1 = _quad_roots(c0, c1, c2, mul, neg, inv, qcount, qroots)
    ny = 0
    nz = 0
    if n >= 0:
        # only the roots of G5 can contribute
        for i in range(n):
            x[L.A2] = r0 if i == 0 else r1
            g61, g62 = _g6_tilde_parts(x, M, W7, ti, tj, tv, tc, add, sub, mul, neg, inv)
            if g61 == 0:
                ny += 1
                if g62 == 0:
                    nz += 1
        return ny, nz
    # G5 vanishes for every a2: interpolate G~6^1 and G~6^2 too
    h1 = np.empty(3, dtype=np.int64)
    h2 = np.empty(3, dtype=np.int64)
    for s in range(3):
        x[L.A2] = s
        h1[s], h2[s] = _g6_tilde_parts(x, M, W7, ti, tj, tv, tc, add, sub, mul, neg, inv)
    u0, u1, u2 = _interp3(h1[0], h1[1], h1[2], add, sub, mul, inv)
    v0, v1, v2 = _interp3(h2[0], h2[1], h2[2], add, sub, mul, inv)
    n1, r0, r1 = _quad_roots(u0, u1, u2, mul, neg, inv, qcount, qroots)
    if n1 < 0:
        n2, _, _ = _quad_roots(v0, v1, v2, mul, neg, inv, qcount, qroots)
        return q, (q if n2 < 0 else n2)
    for i in range(n1):
        r = r0 if i == 0 else r1
        if _peval(v0, v1, v2, r, add, mul) == 0:
            nz += 1
    return n1, nz


@njit(cache=True)
def xstrip_shard_baseline(a1, a3, q, ti, tj, tv, tc, add, sub, mul, neg, inv):
    x = np.zeros(L.N_VARS, dtype=np.int64)
    M = np.zeros((7, 7), dtype=np.int64)
    W5 = np.zeros((5, 5), dtype=np.int64)
    W6 = np.zeros((6, 6), dtype=np.int64)
    W7 = np.zeros((7, 7), dtype=np.int64)
    x[L.A1] = a1
    x[L.A3] = a3
    # last free coordinate varies fastest
    free = np.array(L.BASELINE_FREE)
    nf = free.shape[0]
    ny = 0
    nz = 0
    while True:
        x[L.A2] = 0
        x[L.B1] = 0
        _build(M, x, ti, tj, tv, tc, add, mul)
        i5 = _trailing_det(M, 2, W5, sub, mul, neg, inv)
        if i5 == 0:
            dy, dz = _a2_loop(x, q, M, W6, W7, ti, tj, tv, tc, add, sub, mul, neg, inv)
            ny += dy
            nz += dz
        pos = nf - 1
        while pos >= 0:
            x[free[pos]] += 1
            if x[free[pos]] < q:
                break
            x[free[pos]] = 0
            pos -= 1
        if pos < 0:
            break
    return ny, nz


@njit(cache=True)
def xstrip_shard_accelerated(a1, a3, q, ti, tj, tv, tc, add, sub, mul, neg, inv, qcount, qroots):
    x = np.zeros(L.N_VARS, dtype=np.int64)
    M = np.zeros((7, 7), dtype=np.int64)
    W4 = np.zeros((4, 4), dtype=np.int64)
    W5 = np.zeros((5, 5), dtype=np.int64)
    W6 = np.zeros((6, 6), dtype=np.int64)
    W7 = np.zeros((7, 7), dtype=np.int64)
    x[L.A1] = a1
    x[L.A3] = a3
    free = np.array(L.ACCELERATED_FREE)
    nf = free.shape[0]
    ny = 0
    nz = 0
    while True:
        x[L.A2] = 0
        x[L.B1] = 0
        x[L.B2] = 0
        _build(M, x, ti, tj, tv, tc, add, mul)
        i4 = _trailing_det(M, 3, W4, sub, mul, neg, inv)
        # I5 = B2 I4 - G4 and G4 = -I5|_{B2=0}
        g4 = neg[_trailing_det(M, 2, W5, sub, mul, neg, inv)]
        if i4 != 0:
            x[L.B2] = mul[g4, inv[i4]]
            # F_2 has too few points to sample a quadratic, so loop a2 there
            if q == 2:
                dy, dz = _a2_loop(x, q, M, W6, W7, ti, tj, tv, tc, add, sub, mul, neg, inv)
            else:
                dy, dz = _a2_sampled(x, q, M, W6, W7, ti, tj, tv, tc, add, sub, mul, neg, inv, qcount, qroots)
            ny += dy
            nz += dz
        elif g4 == 0:
            for b2 in range(q):
                x[L.B2] = b2
                if q == 2:
                    dy, dz = _a2_loop(x, q, M, W6, W7, ti, tj, tv, tc, add, sub, mul, neg, inv)
                else:
                    dy, dz = _a2_sampled(x, q, M, W6, W7, ti, tj, tv, tc, add, sub, mul, neg, inv, qcount, qroots)
                ny += dy
                nz += dz
        pos = nf - 1
        while pos >= 0:
            x[free[pos]] += 1
            if x[free[pos]] < q:
                break
            x[free[pos]] = 0
            pos -= 1
        if pos < 0:
            break
    return ny, nz


@njit(cache=True)
def xstrip_midform(q, ti, tj, tv, tc, add, sub, mul, neg, inv):
    """(#V(I5, G5) in 11-space, #V(I5, I6, G~6) in 12-space)."""
    x = np.zeros(L.N_VARS, dtype=np.int64)
    M = np.zeros((7, 7), dtype=np.int64)
    W5 = np.zeros((5, 5), dtype=np.int64)
    W6 = np.zeros((6, 6), dtype=np.int64)
    W7 = np.zeros((7, 7), dtype=np.int64)
    free = np.array(L.MIDFORM_FREE)
    nf = free.shape[0]
    n_v5 = 0
    n_w = 0
    while True:
        x[L.B1] = 0
        _build(M, x, ti, tj, tv, tc, add, mul)
        i5 = _trailing_det(M, 2, W5, sub, mul, neg, inv)
        if i5 == 0:
            if _trailing_det(M, 1, W6, sub, mul, neg, inv) == 0:
                n_v5 += 1
            for b1 in range(q):
                x[L.B1] = b1
                _build(M, x, ti, tj, tv, tc, add, mul)
                if _trailing_det(M, 1, W6, sub, mul, neg, inv) == 0:
                    if _trailing_det(M, 0, W7, sub, mul, neg, inv) == 0:
                        n_w += 1
        pos = nf - 1
        while pos >= 0:
            x[free[pos]] += 1
            if x[free[pos]] < q:
                break
            x[free[pos]] = 0
            pos -= 1
        if pos < 0:
            break
    return n_v5, n_w
