"""Exact linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries reduced to [0, p).  Column
vectors are the convention everywhere: a matrix ``A`` of shape (m, n)
sends k^n to k^m.

The row reduction kernel comes from the compiled extension when it can be
imported; otherwise the numpy fallback is used.  Setting ``ITDIST_PURE=1``
forces the fallback (handy for the benchmark and for debugging).
"""

from __future__ import annotations

import os

import numpy as np

from . import _fallback

KERNEL = "python"
_rref_impl = _fallback.rref_inplace

if not os.environ.get("ITDIST_PURE"):
    try:
        from . import _kernels  # type: ignore[attr-defined]

        _rref_impl = _kernels.rref_inplace
        KERNEL = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass


def use_kernel(name: str) -> None:
    """Switch the row-reduction kernel at runtime ("cython" or "python")."""
    global _rref_impl, KERNEL
    if name == "python":
        _rref_impl = _fallback.rref_inplace
    elif name == "cython":
        from . import _kernels  # type: ignore[attr-defined]

        _rref_impl = _kernels.rref_inplace
    else:
        raise ValueError(name)
    KERNEL = name


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=np.int64)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def asmat(A, p: int) -> np.ndarray:
    return np.asarray(A, dtype=np.int64) % p


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Product mod p.

    Goes through float64 BLAS when the partial sums stay below 2^53, which
    is exact; otherwise falls back to int64 with a chunked reduction.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    n = A.shape[1]
    if (p - 1) * (p - 1) * n < 2**53:
        C = np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64)
        return np.mod(C, p).astype(np.int64)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    step = max(1, (2**62) // ((p - 1) * (p - 1)))
    for s in range(0, n, step):
        out = (out + A[:, s:s + step] @ B[s:s + step, :]) % p
    return out


def mmul(p: int, *mats) -> np.ndarray:
    """Chained product mod p."""
    out = mats[0]
    for M in mats[1:]:
        out = matmul(out, M, p)
    return out


def rref(A: np.ndarray, p: int):
    """Return ``(R, pivots)``: the reduced echelon form (nonzero rows only)."""
    R = np.ascontiguousarray(np.asarray(A, dtype=np.int64) % p)
    if R.size == 0:
        return R[:0].copy(), []
    r, piv = _rref_impl(R, p)
    return R[:r].copy(), list(piv)


def rank(A: np.ndarray, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as the columns of an (n, k) matrix."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    if n == 0:
        return zeros(0, 0)
    if m == 0:
        return eye(n)
    R, piv = rref(A, p)
    free = [j for j in range(n) if j not in set(piv)]
    N = zeros(n, len(free))
    for k, f in enumerate(free):
        N[f, k] = 1
        for i, c in enumerate(piv):
            N[c, k] = (-R[i, f]) % p
    return N


def left_nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Rows y with y A = 0, stacked as a (k, m) matrix."""
    return nullspace(np.asarray(A).T, p).T.copy()


def colspace(A: np.ndarray, p: int) -> np.ndarray:
    """A subset of the columns of ``A`` forming a basis of its column space."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[1] == 0 or A.shape[0] == 0:
        return zeros(A.shape[0], 0)
    _, piv = rref(A, p)
    return A[:, piv].copy()


def independent_columns(A: np.ndarray, p: int) -> list[int]:
    A = np.asarray(A, dtype=np.int64)
    if A.shape[1] == 0 or A.shape[0] == 0:
        return []
    return rref(A, p)[1]


def solve(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """A particular solution X of A X = B; raises ValueError if none exists."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    m, n = A.shape
    k = B.shape[1]
    if m == 0:
        return zeros(n, k)
    aug = np.concatenate([A % p, B % p], axis=1)
    R, piv = rref(aug, p)
    if any(c >= n for c in piv):
        raise ValueError("inconsistent linear system")
    X = zeros(n, k)
    for i, c in enumerate(piv):
        X[c] = R[i, n:]
    return X


def inverse(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return zeros(0, 0)
    R, piv = rref(np.concatenate([A % p, eye(n)], axis=1), p)
    if piv[:n] != list(range(n)) or len(piv) < n or piv[n - 1] >= n:
        raise ValueError("singular matrix")
    return R[:, n:].copy()


def is_invertible(A: np.ndarray, p: int) -> bool:
    return A.shape[0] == A.shape[1] and rank(A, p) == A.shape[0]


def extend_basis(U: np.ndarray, V: np.ndarray, p: int) -> list[int]:
    """Indices of columns of V that extend the column space of U.

    The chosen columns together with U form a basis of span(U, V).
    """
    U = np.asarray(U, dtype=np.int64)
    V = np.asarray(V, dtype=np.int64)
    if V.shape[1] == 0:
        return []
    if U.shape[1] == 0:
        return independent_columns(V, p)
    piv = independent_columns(np.concatenate([U, V], axis=1), p)
    u = U.shape[1]
    base = sum(1 for c in piv if c < u)
    if base != rank(U, p):
        raise AssertionError("pivot bookkeeping")
    return [c - u for c in piv if c >= u]


def in_span(U: np.ndarray, v: np.ndarray, p: int) -> bool:
    if U.shape[1] == 0:
        return not np.any(np.asarray(v) % p)
    return rank(np.concatenate([U, v.reshape(-1, 1)], axis=1), p) == rank(U, p)


def coords(U: np.ndarray, V: np.ndarray, p: int) -> np.ndarray:
    """Coordinates of the columns of V in the (independent) columns of U."""
    return solve(U, V, p)


def projector_mod(S: np.ndarray, n: int, p: int):
    """Quotient data for k^n / span(S).

    Returns ``(Q, R)`` with Q of shape (q, n) of full row rank, Q S = 0,
    and R of shape (n, q) with Q R = identity.
    """
    S = np.asarray(S, dtype=np.int64)
    S = zeros(n, 0) if S.size == 0 else S.reshape(n, -1)
    if S.shape[1] == 0:
        return eye(n), eye(n)
    Q = left_nullspace(S, p) if n else zeros(0, 0)
    if Q.shape[0] == 0:
        return zeros(0, n), zeros(n, 0)
    R = solve(Q, eye(Q.shape[0]), p)
    return Q, R


def random_matrix(rng: np.random.Generator, m: int, n: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(m, n), dtype=np.int64)


def random_invertible(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    while True:
        g = random_matrix(rng, n, n, p)
        if is_invertible(g, p):
            return g


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True
