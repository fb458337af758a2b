# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels.

Mirrors :mod:`permhaar._pykernels` function for function.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

ctypedef cnp.int64_t i64


def stat_x(smap, tmap, Py_ssize_t N, bint set_mode):
    cdef const i64[::1] s = np.ascontiguousarray(smap, dtype=np.int64)
    cdef const i64[::1] t = np.ascontiguousarray(tmap, dtype=np.int64)
    cdef i64[::1] tinv = np.empty(N * N, dtype=np.int64)
    cdef Py_ssize_t x, i, j, a, b
    cdef long long total = 0
    for x in range(N * N):
        tinv[t[x]] = x
    for i in range(N):
        for j in range(N):
            x = tinv[s[i * N + j]]
            a = x // N
            b = x % N
            if a == i:
                total += 1
            if b == j:
                total += 1
            if set_mode and a == i and b == j and a == b:
                total -= 1
    return total


cdef void _hists(const i64[::1] m, Py_ssize_t N, i64[:, ::1] RR, i64[:, ::1] CR,
                 i64[:, ::1] RC, i64[:, ::1] CC) nogil:
    cdef Py_ssize_t i, j, r, c
    for i in range(N):
        for j in range(N):
            r = m[i * N + j] // N
            c = m[i * N + j] % N
            RR[i, r] += 1
            CR[j, r] += 1
            RC[i, c] += 1
            CC[j, c] += 1


cdef long long _intersect(const i64[::1] s, const i64[::1] m, Py_ssize_t N, bint use_row) nogil:
    # #{(i,j,k): f(s(i,j)) == f(m(i,k)) == f(m(k,j))}, f = row or column,
    # walked through buckets of j grouped by (k, f(m(k,j)))
    cdef i64* start = <i64*> malloc((N * N + 1) * sizeof(i64))
    cdef i64* fill = <i64*> malloc((N * N) * sizeof(i64))
    cdef i64* cols = <i64*> malloc((N * N) * sizeof(i64))
    cdef Py_ssize_t i, j, k, v, key, e
    cdef long long total = 0
    for key in range(N * N + 1):
        start[key] = 0
    for k in range(N):
        for j in range(N):
            v = m[k * N + j] // N if use_row else m[k * N + j] % N
            start[k * N + v + 1] += 1
    for key in range(N * N):
        start[key + 1] += start[key]
    for key in range(N * N):
        fill[key] = start[key]
    for k in range(N):
        for j in range(N):
            v = m[k * N + j] // N if use_row else m[k * N + j] % N
            cols[fill[k * N + v]] = j
            fill[k * N + v] += 1
    for i in range(N):
        for k in range(N):
            v = m[i * N + k] // N if use_row else m[i * N + k] % N
            key = k * N + v
            for e in range(start[key], start[key + 1]):
                j = cols[e]
                if use_row:
                    if s[i * N + j] // N == v:
                        total += 1
                else:
                    if s[i * N + j] % N == v:
                        total += 1
    free(start)
    free(fill)
    free(cols)
    return total


def stat_y(smap, mmap, Py_ssize_t N, bint set_mode):
    cdef const i64[::1] s = np.ascontiguousarray(smap, dtype=np.int64)
    cdef const i64[::1] m = np.ascontiguousarray(mmap, dtype=np.int64)
    cdef i64[:, ::1] RR = np.zeros((N, N), dtype=np.int64)
    cdef i64[:, ::1] CR = np.zeros((N, N), dtype=np.int64)
    cdef i64[:, ::1] RC = np.zeros((N, N), dtype=np.int64)
    cdef i64[:, ::1] CC = np.zeros((N, N), dtype=np.int64)
    cdef Py_ssize_t i, j, r, c
    cdef long long y1 = 0, y2 = 0
    _hists(m, N, RR, CR, RC, CC)
    for i in range(N):
        for j in range(N):
            r = s[i * N + j] // N
            c = s[i * N + j] % N
            y1 += RR[i, r] + CR[j, r]
            y2 += RC[i, c] + CC[j, c]
    if set_mode:
        y1 -= _intersect(s, m, N, True)
        y2 -= _intersect(s, m, N, False)
    return y1, y2


def stat_z(smap, Py_ssize_t N):
    cdef const i64[::1] s = np.ascontiguousarray(smap, dtype=np.int64)
    cdef i64[:, ::1] RR = np.zeros((N, N), dtype=np.int64)
    cdef i64[:, ::1] CR = np.zeros((N, N), dtype=np.int64)
    cdef i64[:, ::1] RC = np.zeros((N, N), dtype=np.int64)
    cdef i64[:, ::1] CC = np.zeros((N, N), dtype=np.int64)
    cdef Py_ssize_t i, j, r, c
    cdef long long total = 0
    _hists(s, N, RR, CR, RC, CC)
    for i in range(N):
        for j in range(N):
            r = s[i * N + j] // N
            c = s[i * N + j] % N
            total += RR[i, r] * CC[j, c] + CR[j, r] * RC[i, c]
    return total


cdef long long _dfs(Py_ssize_t d, Py_ssize_t m, Py_ssize_t N,
                    const i64[:, :, ::1] ck, const i64[:, :, ::1] cl,
                    const i64* p, const i64* q, i64* idx, i64* K, i64* L) nogil:
    # idx[0..d-1] assigned; letters 0..d-2 resolved into K, L
    cdef long long total = 0
    cdef Py_ssize_t v, s
    if d == m:
        s = m - 1
        K[s] = ck[s, idx[s], idx[0]]
        L[s] = cl[s, idx[s], idx[0]]
        if K[p[s]] != K[s] or L[q[s]] != L[s]:
            return 0
        return 1
    s = d - 1
    for v in range(N):
        idx[d] = v
        K[s] = ck[s, idx[s], v]
        L[s] = cl[s, idx[s], v]
        if p[s] < s and K[p[s]] != K[s]:
            continue
        if q[s] < s and L[q[s]] != L[s]:
            continue
        total += _dfs(d + 1, m, N, ck, cl, p, q, idx, K, L)
    return total


def count_a(cellk, celll, p, q, Py_ssize_t N):
    """Depth-first count with pruning, see ``_pykernels.count_a``."""
    cdef const i64[:, :, ::1] ck = np.ascontiguousarray(cellk, dtype=np.int64)
    cdef const i64[:, :, ::1] cl = np.ascontiguousarray(celll, dtype=np.int64)
    cdef Py_ssize_t m = ck.shape[0]
    cdef const i64[::1] pp = np.ascontiguousarray(p, dtype=np.int64)
    cdef const i64[::1] qq = np.ascontiguousarray(q, dtype=np.int64)
    cdef i64[::1] idx = np.zeros(m, dtype=np.int64)
    cdef i64[::1] K = np.zeros(m, dtype=np.int64)
    cdef i64[::1] L = np.zeros(m, dtype=np.int64)
    cdef long long total = 0
    cdef Py_ssize_t v
    if m < 2:
        raise ValueError("words need at least two letters")
    with nogil:
        for v in range(N):
            idx[0] = v
            total += _dfs(1, m, N, ck, cl, &pp[0], &qq[0], &idx[0], &K[0], &L[0])
    return total
