# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.string cimport memset

cnp.import_array()


def ring_square(mul, inv, coeff):
    cdef const int[:, ::1] M = np.ascontiguousarray(mul, dtype=np.int32)
    cdef const int[::1] I = np.ascontiguousarray(inv, dtype=np.int32)
    cdef const long long[::1] C = np.ascontiguousarray(coeff, dtype=np.int64)
    cdef Py_ssize_t n = C.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(n, dtype=np.int64)
    cdef long long[::1] O = out
    cdef Py_ssize_t a, b
    cdef long long ca
    for a in range(n):
        ca = C[a]
        if ca == 0:
            continue
        for b in range(n):
            if C[b]:
                O[M[a, I[b]]] += ca * C[b]
    return out


cdef struct LiftState:
    int n
    int F
    int m
    int cap
    long long t_id
    long long t_off
    int identity
    int* mul
    int* inv
    int* fibers
    int* counts
    long long* P
    int* sup_el
    int* sup_val
    int nsup
    unsigned char* vec


cdef inline bint _add(LiftState* S, int y, int t):
    cdef int k, a, s, z1, z2
    cdef long long st
    cdef int n = S.n
    cdef bint ok = True
    S.P[S.identity] += t * t
    if S.P[S.identity] > S.t_id:
        ok = False
    cdef int iy = S.inv[y]
    for k in range(S.nsup):
        a = S.sup_el[k]
        s = S.sup_val[k]
        st = s * t
        z1 = S.mul[a * n + iy]
        z2 = S.mul[y * n + S.inv[a]]
        S.P[z1] += st
        S.P[z2] += st
        if S.P[z1] > S.t_off or S.P[z2] > S.t_off:
            ok = False
    return ok


cdef inline void _undo(LiftState* S, int y, int t):
    cdef int k, a, s
    cdef long long st
    cdef int n = S.n
    cdef int iy = S.inv[y]
    S.P[S.identity] -= t * t
    for k in range(S.nsup):
        a = S.sup_el[k]
        s = S.sup_val[k]
        st = s * t
        S.P[S.mul[a * n + iy]] -= st
        S.P[S.mul[y * n + S.inv[a]]] -= st


cdef void _rec(LiftState* S, int f, int j, int rem, list out):
    cdef int hi, lo, t, y
    cdef bint ok
    if f == S.F:
        out.append(S.vec[:S.n])
        return
    if j == S.m - 1:
        if rem > S.cap:
            return
        hi = rem
        lo = rem
    else:
        hi = S.cap if S.cap < rem else rem
        lo = rem - S.cap * (S.m - 1 - j)
        if lo < 0:
            lo = 0
    y = S.fibers[f * S.m + j]
    t = hi
    while t >= lo:
        if t:
            ok = _add(S, y, t)
            if ok:
                S.sup_el[S.nsup] = y
                S.sup_val[S.nsup] = t
                S.nsup += 1
                S.vec[y] = <unsigned char>t
                if j == S.m - 1:
                    _rec(S, f + 1, 0, S.counts[f + 1] if f + 1 < S.F else 0, out)
                else:
                    _rec(S, f, j + 1, rem - t, out)
                S.vec[y] = 0
                S.nsup -= 1
            _undo(S, y, t)
        else:
            if j == S.m - 1:
                _rec(S, f + 1, 0, S.counts[f + 1] if f + 1 < S.F else 0, out)
            else:
                _rec(S, f, j + 1, rem, out)
        t -= 1


def lift_preimages(mul, inv, int identity, fibers, counts, int cap, long long t_id, long long t_off):
    cdef cnp.ndarray[cnp.int32_t, ndim=2] M = np.array(mul, dtype=np.int32, order="C")
    cdef cnp.ndarray[cnp.int32_t, ndim=1] I = np.array(inv, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] Fb = np.ascontiguousarray(np.asarray(fibers, dtype=np.int32).reshape(len(counts), -1) if len(counts) else np.zeros((0, 1), dtype=np.int32))
    cdef cnp.ndarray[cnp.int32_t, ndim=1] Cn = np.ascontiguousarray(counts, dtype=np.int32)
    cdef LiftState S
    cdef list out = []
    S.n = M.shape[0]
    S.F = Cn.shape[0]
    S.m = Fb.shape[1]
    S.cap = cap
    S.t_id = t_id
    S.t_off = t_off
    S.identity = identity
    S.mul = <int*>M.data
    S.inv = <int*>I.data
    S.fibers = <int*>Fb.data
    S.counts = <int*>Cn.data
    S.nsup = 0
    S.P = <long long*>malloc(S.n * sizeof(long long))
    S.sup_el = <int*>malloc((S.n + 1) * sizeof(int))
    S.sup_val = <int*>malloc((S.n + 1) * sizeof(int))
    S.vec = <unsigned char*>malloc(S.n + 1)
    if not S.P or not S.sup_el or not S.sup_val or not S.vec:
        free(S.P); free(S.sup_el); free(S.sup_val); free(S.vec)
        raise MemoryError()
    memset(S.P, 0, S.n * sizeof(long long))
    memset(S.vec, 0, S.n + 1)
    try:
        if S.F:
            _rec(&S, 0, 0, S.counts[0], out)
        else:
            out.append(S.vec[:S.n])
    finally:
        free(S.P); free(S.sup_el); free(S.sup_val); free(S.vec)
    return out
