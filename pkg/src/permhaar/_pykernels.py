"""Pure numpy implementations of the counting kernels.

Same signatures as the compiled ``_ckernels`` module; selected by
:mod:`permhaar.kernels` when the extension is unavailable.  All maps are flat
int64 arrays of length ``N*N`` in row-major cell encoding.
"""
import numpy as np


def _hist(rows, values, N):
    # h[a, v] = #{positions with key a and value v}
    return np.bincount((rows * N + values).ravel(), minlength=N * N).reshape(N, N)


def stat_x(smap, tmap, N, set_mode):
    smap = np.asarray(smap, dtype=np.int64)
    tinv = np.empty_like(np.asarray(tmap, dtype=np.int64))
    tinv[tmap] = np.arange(N * N, dtype=np.int64)
    pre = tinv[smap]
    a, b = np.divmod(pre, N)
    i, j = np.divmod(np.arange(N * N, dtype=np.int64), N)
    row_hit = a == i
    col_hit = b == j
    total = int(row_hit.sum() + col_hit.sum())
    if set_mode:
        total -= int((row_hit & col_hit & (a == b)).sum())
    return total


def _intersections(sv, mv, N):
    # #{(i,j,k): sv[i,j] == mv[i,k] == mv[k,j]}
    total = 0
    for i in range(N):
        hit = (mv[i][:, None] == mv) & (sv[i][None, :] == mv)
        total += int(hit.sum())
    return total


def stat_y(smap, mmap, N, set_mode):
    smap = np.asarray(smap, dtype=np.int64).reshape(N, N)
    mmap = np.asarray(mmap, dtype=np.int64).reshape(N, N)
    sr, sc = np.divmod(smap, N)
    mr, mc = np.divmod(mmap, N)
    ii = np.repeat(np.arange(N), N).reshape(N, N)
    jj = ii.T
    RR = _hist(ii, mr, N)
    CR = _hist(jj, mr, N)
    RC = _hist(ii, mc, N)
    CC = _hist(jj, mc, N)
    y1 = int(RR[ii, sr].sum() + CR[jj, sr].sum())
    y2 = int(RC[ii, sc].sum() + CC[jj, sc].sum())
    if set_mode:
        y1 -= _intersections(sr, mr, N)
        y2 -= _intersections(sc, mc, N)
    return y1, y2


def stat_z(smap, N):
    smap = np.asarray(smap, dtype=np.int64).reshape(N, N)
    r, c = np.divmod(smap, N)
    ii = np.repeat(np.arange(N), N).reshape(N, N)
    jj = ii.T
    RR = _hist(ii, r, N)
    RC = _hist(ii, c, N)
    CR = _hist(jj, r, N)
    CC = _hist(jj, c, N)
    first = RR[ii, r] * CC[jj, c]
    second = CR[jj, r] * RC[ii, c]
    return int(first.sum() + second.sum())


def count_a(cellk, celll, p, q, N):
    """Count cyclic index tuples satisfying the pairing constraints.

    ``cellk[s, i, j]`` / ``celll[s, i, j]`` give the row / column of the entry
    of ``U`` read by letter ``s`` at matrix position ``(i, j)``.  The search is
    level-synchronous: the frontier of admissible prefixes is extended one
    index at a time and filtered as soon as a constraint can be decided.
    """
    cellk = np.asarray(cellk, dtype=np.int64)
    celll = np.asarray(celll, dtype=np.int64)
    m = cellk.shape[0]
    idx = np.arange(N, dtype=np.int64)[:, None]
    K = np.empty((N, 0), dtype=np.int64)
    L = np.empty((N, 0), dtype=np.int64)

    def filt(idx, K, L, s):
        keep = np.ones(len(idx), dtype=bool)
        if p[s] < K.shape[1]:
            keep &= K[:, p[s]] == K[:, s]
        if q[s] < L.shape[1]:
            keep &= L[:, q[s]] == L[:, s]
        return idx[keep], K[keep], L[keep]

    for s in range(m - 1):
        rows = idx.shape[0]
        idx = np.hstack([np.repeat(idx, N, axis=0), np.tile(np.arange(N, dtype=np.int64), rows)[:, None]])
        K = np.repeat(K, N, axis=0)
        L = np.repeat(L, N, axis=0)
        a, b = idx[:, s], idx[:, s + 1]
        K = np.hstack([K, cellk[s, a, b][:, None]])
        L = np.hstack([L, celll[s, a, b][:, None]])
        idx, K, L = filt(idx, K, L, s)
        if len(idx) == 0:
            return 0
    s = m - 1
    a, b = idx[:, s], idx[:, 0]
    K = np.hstack([K, cellk[s, a, b][:, None]])
    L = np.hstack([L, celll[s, a, b][:, None]])
    idx, K, L = filt(idx, K, L, s)
    return int(len(idx))
