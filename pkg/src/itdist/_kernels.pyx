# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled row reduction over F_p.

Same contract as ``itdist._fallback.rref_inplace``.
"""

cdef long long _inv(long long a, long long p):
    cdef long long r = 1
    cdef long long e = p - 2
    a = a % p
    while e > 0:
        if e & 1:
            r = (r * a) % p
        a = (a * a) % p
        e >>= 1
    return r


def rref_inplace(long long[:, ::1] A, long long p):
    cdef Py_ssize_t rows = A.shape[0]
    cdef Py_ssize_t cols = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef long long inv, f, t
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = t
        inv = _inv(A[r, c], p)
        for j in range(c, cols):
            A[r, j] = (A[r, j] * inv) % p
        for i in range(rows):
            if i == r:
                continue
            f = A[i, c]
            if f == 0:
                continue
            for j in range(c, cols):
                if A[r, j] != 0:
                    t = (A[i, j] - f * A[r, j]) % p
                    if t < 0:
                        t += p
                    A[i, j] = t
        pivots.append(c)
        r += 1
    return r, pivots
