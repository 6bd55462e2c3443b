import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itdist import modrep as mr
from itdist import randgen as rg
from itdist.constructions import dual
from itdist.errors import InvariantViolation, ParseError

import oracles

SMALL = ["a2", "a3", "kron", "loop2", "loop3", "ext2", "nak2", "fig2"]


def S(A, v):
    return mr.standard_module(A, "simple", v)


def P(A, v):
    return mr.standard_module(A, "projective", v)


def I(A, v):
    return mr.standard_module(A, "injective", v)


# -- standard modules --------------------------------------------------------

def test_standard_modules_dual_numbers(alg):
    A = alg("loop2")
    assert (P(A, 0).dim, S(A, 0).dim, I(A, 0).dim) == (2, 1, 2)


def test_standard_modules_a2(alg):
    A = alg("a2")
    assert P(A, "1").dims == (1, 1)
    ok, _ = mr.is_isomorphic(P(A, "2"), S(A, "2"))
    assert ok
    assert I(A, "2").dims == (1, 1)
    assert I(A, "1").dims == (1, 0)


def test_projective_over_exterior(alg):
    assert P(alg("ext2"), 0).dim == 4


def test_top_of_projective_is_simple(alg):
    for name in SMALL:
        A = alg(name)
        for v in range(A.nv):
            top = mr.layers(P(A, v)).top
            ok, _ = mr.is_isomorphic(top, S(A, v))
            assert ok


def test_unknown_vertex(alg):
    with pytest.raises(KeyError):
        mr.standard_module(alg("a2"), "simple", "9")


# -- Hom -----------------------------------------------------------------------

def test_hom_small_cases(alg):
    A = alg("a2")
    assert mr.hom_basis(S(A, 0), S(A, 1)) == []
    assert len(mr.hom_basis(P(A, 0), S(A, 0))) == 1


def test_hom_maps_are_intertwiners(alg, rng):
    A = alg("fig2")
    for _ in range(5):
        M = rg.random_module(A, rng, max_dim=10)
        N = rg.random_module(A, rng, max_dim=10)
        for f in mr.hom_basis(M, N):
            f.validate()
        assert len(mr.hom_basis(M, N)) == oracles.hom_dim(A, M, N)


def test_hom_algebra_mismatch(alg):
    with pytest.raises(InvariantViolation):
        mr.hom_basis(S(alg("a2"), 0), S(alg("kron"), 0))


# -- kernels, images, cokernels ------------------------------------------------

def test_map_spaces_identity_and_zero(alg):
    A = alg("ext2")
    M = P(A, 0)
    (K, _), (Im, _, _), (C, _) = mr.map_spaces(mr.identity(M))
    assert (K.dim, Im.dim, C.dim) == (0, 4, 0)
    N = S(A, 0)
    (K, _), (Im, _, _), (C, _) = mr.map_spaces(mr.zero_map(M, N))
    assert (K.dim, Im.dim, C.dim) == (4, 0, 1)


def test_kernel_of_cover_a2(alg):
    A = alg("a2")
    f = mr.hom_basis(P(A, 0), S(A, 0))[0]
    (K, kin), _, _ = mr.map_spaces(f)
    kin.validate()
    ok, _ = mr.is_isomorphic(K, S(A, 1))
    assert ok


# -- layers --------------------------------------------------------------------

def test_layers_simple(alg):
    A = alg("a3")
    L = mr.layers(S(A, 1))
    assert L.top.dim == L.soc.dim == 1 and L.rad.dim == 0


def test_layers_dual_numbers(alg):
    A = alg("loop2")
    L = mr.layers(P(A, 0))
    assert L.rad.dim == L.soc.dim == 1
    ok, _ = mr.is_isomorphic(L.rad, L.soc)
    assert ok


def test_radical_series_exterior(alg):
    assert mr.radical_series(P(alg("ext2"), 0)) == (4, 3, 1, 0)


# -- decomposition ---------------------------------------------------------------

def test_decompose_two_simples(alg):
    A = alg("a2")
    M = mr.direct_sum([S(A, 0), S(A, 0)])[0]
    d = mr.decompose(M)
    assert len(d.classes) == 1 and d.classes[0][1] == 2
    assert d.witness.is_iso()


def test_projective_indecomposable(alg):
    assert mr.decompose(P(alg("a2"), 0)).is_indecomposable()


def test_decompose_shuffled_sum(alg, rng):
    A = alg("a2")
    M = mr.direct_sum([P(A, 0), S(A, 1), S(A, 1)])[0]
    Mc = rg.random_conjugate(M, rng)
    d = mr.decompose(Mc, seed=3)
    got = sorted((X.dims, m) for X, m in d.classes)
    assert got == [((0, 1), 2), ((1, 1), 1)]
    assert d.witness.is_iso()


def test_decompose_is_deterministic(alg, rng):
    A = alg("fig2")
    M = mr.direct_sum([rg.random_module(A, rng, max_dim=8) for _ in range(2)])[0]
    a = mr.decompose(M, seed=5)
    b = mr.decompose(M, seed=5)
    assert [X.dims for X, _ in a.classes] == [X.dims for X, _ in b.classes]
    assert all(np.array_equal(f.total(), g.total()) for (_, f), (_, g) in zip(a.summands, b.summands))


# -- isomorphism -------------------------------------------------------------------

def test_iso_with_change_of_basis(alg, rng):
    A = alg("ext2")
    M = rg.random_module(A, rng, max_dim=8)
    ok, w = mr.is_isomorphic(M, rg.random_conjugate(M, rng))
    assert ok and w.is_iso()
    w.validate()


def test_simples_not_isomorphic(alg):
    A = alg("a2")
    assert mr.is_isomorphic(S(A, 0), S(A, 1))[0] is False


def test_syzygy_of_simple_dual_numbers(alg):
    from itdist.homology import syzygy
    A = alg("loop2")
    assert mr.is_isomorphic(syzygy(S(A, 0)), S(A, 0))[0]


# -- direct sums ------------------------------------------------------------------------

def test_direct_sum_empty(alg):
    Z, inj, proj = mr.direct_sum([], alg("a2"))
    assert Z.dim == 0 and inj == [] and proj == []


def test_direct_sum_simples(alg):
    A = alg("a2")
    M, inj, proj = mr.direct_sum([S(A, 0), S(A, 1)])
    assert M.dims == (1, 1)
    assert not M.mats[0].any()
    for i, e in enumerate(inj):
        for j, q in enumerate(proj):
            c = mr.compose(q, e)
            assert (c.is_iso() if i == j else c.is_zero())


# -- text format -------------------------------------------------------------------------

def test_module_text_round_trip(alg, rng):
    A = alg("fig1")
    M = rg.random_module(A, rng, max_dim=10)
    N = mr.parse_module(mr.module_text(M), A)
    assert N.dims == M.dims
    assert all(np.array_equal(a, b) for a, b in zip(M.mats, N.mats))


@pytest.mark.parametrize("text", [
    "dim 1 = 1\n",
    "module over a2\ndim 7 = 1\n",
    "module over a2\ndim 1 = 1\ndim 2 = 1\nmatrix a = [[1, 2]]\n",
    "module over a2\nmatrix zz = [[1]]\n",
    "module over a2\nmatrix a = [[1\n",
])
def test_module_parse_errors(alg, text):
    with pytest.raises(ParseError):
        mr.parse_module(text, alg("a2"))


def test_module_relation_violation(alg):
    A = alg("loop2")
    with pytest.raises(InvariantViolation):
        mr.ModuleRep(A, [2], [[[0, 1], [1, 0]]])


# -- properties ----------------------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)
small_fixture = st.sampled_from(SMALL)


@settings(max_examples=40)
@given(small_fixture, seeds)
def test_krull_schmidt_under_conjugation(alg, name, seed):
    A = alg(name)
    r = np.random.default_rng(seed)
    M = mr.direct_sum([rg.random_module(A, r, max_dim=6) for _ in range(2)])[0]
    Mc = rg.random_conjugate(M, r)
    assert mr.decompose(M, seed).multiset() == mr.decompose(Mc, seed + 1).multiset()


@settings(max_examples=30)
@given(small_fixture, seeds)
def test_reassembly(alg, name, seed):
    A = alg(name)
    r = np.random.default_rng(seed)
    M = rg.random_module(A, r, max_dim=10)
    d = mr.decompose(M, seed)
    pieces = [X for X, m in d.classes for _ in range(m)]
    assert mr.is_isomorphic(mr.direct_sum(pieces, A)[0], M)[0]


@settings(max_examples=40)
@given(small_fixture, seeds)
def test_hom_from_projective_counts_vertex_dims(alg, name, seed):
    A = alg(name)
    M = rg.random_module(A, np.random.default_rng(seed), max_dim=10)
    for v in range(A.nv):
        assert len(mr.hom_basis(P(A, v), M)) == M.dims[v]


@settings(max_examples=40)
@given(small_fixture, seeds)
def test_top_and_socle_semisimple(alg, name, seed):
    A = alg(name)
    M = rg.random_module(A, np.random.default_rng(seed), max_dim=10)
    L = mr.layers(M)
    for X in (L.top, L.soc):
        assert not any(m.any() for m in X.mats)
    assert len(L.series) - 1 <= A.loewy_length
    assert [list(x) for x in oracles.radical_dims(A, M)][:2][0] == list(M.dims)


@settings(max_examples=30)
@given(small_fixture, seeds)
def test_dual_is_a_duality(alg, name, seed):
    A = alg(name)
    r = np.random.default_rng(seed)
    M = rg.random_module(A, r, max_dim=8)
    N = rg.random_module(A, r, max_dim=8)
    DDM = dual(dual(M))
    assert DDM.A is A
    assert mr.is_isomorphic(DDM, M)[0]
    assert len(mr.hom_basis(M, N)) == len(mr.hom_basis(dual(N), dual(M)))


@settings(max_examples=30)
@given(small_fixture, seeds, st.integers(1, 3))
def test_direct_sum_dimension(alg, name, seed, k):
    A = alg(name)
    r = np.random.default_rng(seed)
    mods = [rg.random_module(A, r, max_dim=6) for _ in range(k)]
    assert mr.direct_sum(mods)[0].dim == sum(M.dim for M in mods)
