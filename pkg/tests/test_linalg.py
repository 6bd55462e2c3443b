import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from itdist import _fallback
from itdist import linalg as la

import oracles

P = 101

try:
    from itdist import _kernels
except ImportError:  # pragma: no cover - depends on the build
    _kernels = None

needs_kernel = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def matrices(max_side=12, p=P):
    shape = st.tuples(st.integers(0, max_side), st.integers(0, max_side))
    return shape.flatmap(lambda s: hnp.arrays(np.int64, s, elements=st.integers(0, p - 1)))


def sparse(rng, m, n, p=P, density=0.3):
    A = rng.integers(0, p, size=(m, n))
    return A * (rng.random((m, n)) < density)


def test_kernel_in_use():
    assert la.KERNEL in ("cython", "python")


@needs_kernel
@settings(max_examples=300)
@given(matrices())
def test_kernel_matches_fallback(A):
    X, Y = np.ascontiguousarray(A.copy()), np.ascontiguousarray(A.copy())
    rx, px = _kernels.rref_inplace(X, P)
    ry, py = _fallback.rref_inplace(Y, P)
    assert rx == ry and list(px) == list(py)
    assert np.array_equal(X, Y)


@needs_kernel
def test_use_kernel_switch():
    A = sparse(np.random.default_rng(0), 30, 40)
    la.use_kernel("python")
    try:
        a = la.rref(A, P)
    finally:
        la.use_kernel("cython")
    b = la.rref(A, P)
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]
    with pytest.raises(ValueError):
        la.use_kernel("fortran")


@settings(max_examples=200)
@given(matrices())
def test_rank_matches_oracle(A):
    assert la.rank(A, P) == oracles.gf_rank(A.tolist(), P)


@settings(max_examples=200)
@given(matrices())
def test_nullspace(A):
    N = la.nullspace(A, P)
    n = A.shape[1]
    assert N.shape == (n, n - la.rank(A, P))
    if N.size and A.shape[0]:
        assert not la.matmul(A, N, P).any()
    assert la.rank(N, P) == N.shape[1]


@settings(max_examples=100)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_inverse(n, seed):
    A = la.random_invertible(np.random.default_rng(seed), n, P)
    assert np.array_equal(la.matmul(A, la.inverse(A, P), P), la.eye(n))
    assert la.is_invertible(A, P)


def test_singular_is_not_invertible():
    assert not la.is_invertible(np.array([[1, 2], [2, 4]]), P)


@settings(max_examples=100)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_solve(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, P, size=(m, n))
    X = rng.integers(0, P, size=(n, 2))
    B = la.matmul(A, X, P)
    Y = la.solve(A, B, P)
    assert np.array_equal(la.matmul(A, Y, P), B)


def test_extend_basis_and_span():
    U = np.array([[1], [0], [0]])
    V = np.array([[2, 0, 1], [0, 0, 1], [0, 0, 0]])
    idx = la.extend_basis(U, V, P)
    assert idx == [2]
    assert la.in_span(U, np.array([5, 0, 0]), P)
    assert not la.in_span(U, np.array([0, 1, 0]), P)


def test_matmul_large_prime_is_exact():
    p = 2**31 - 1
    rng = np.random.default_rng(1)
    A = rng.integers(0, p, size=(5, 40))
    B = rng.integers(0, p, size=(40, 3))
    ref = [[sum(int(A[i, k]) * int(B[k, j]) for k in range(40)) % p for j in range(3)] for i in range(5)]
    assert la.matmul(A, B, p).tolist() == ref


@pytest.mark.parametrize("p, expect", [(2, True), (101, True), (100, False), (1, False), (7919, True)])
def test_is_prime(p, expect):
    assert la.is_prime(p) is expect
