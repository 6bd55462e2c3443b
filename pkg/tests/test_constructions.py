import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itdist import constructions as cn
from itdist import invariants as iv
from itdist import modrep as mr
from itdist import randgen as rg
from itdist.algebra import build_based_algebra
from itdist.errors import InvariantViolation
from itdist.presentation import parse_presentation
from itdist.registry import fixture_names

import oracles


def S(A, v):
    return mr.standard_module(A, "simple", v)


def P(A, v):
    return mr.standard_module(A, "projective", v)


def I(A, v):
    return mr.standard_module(A, "injective", v)


def iso(M, N):
    return mr.is_isomorphic(M, N)[0]


# -- opposite algebras ---------------------------------------------------------------

def test_opposite_of_commutative(alg):
    A = alg("loop2")
    assert np.array_equal(cn.opposite(A).table, A.table)


def test_opposite_transposes_cartan(alg):
    A = alg("a2")
    assert np.array_equal(cn.opposite(A).cartan(), A.cartan().T)


@pytest.mark.parametrize("name", ["z4", "fig1", "ext3"])
def test_opposite_keeps_size(alg, name):
    A = alg(name)
    Aop = cn.opposite(A)
    assert (Aop.dim, Aop.loewy_length) == (A.dim, A.loewy_length)
    assert np.array_equal(Aop.opposite().table, A.table)


# -- duality ------------------------------------------------------------------------------

def test_dual_of_simple(alg):
    A = alg("fig2")
    for v in range(A.nv):
        assert iso(cn.dual(S(A, v)), S(cn.opposite(A), v))


def test_dual_of_opposite_projective_is_injective(alg):
    A = alg("a3")
    Aop = cn.opposite(A)
    for v in range(A.nv):
        DP = cn.dual(P(Aop, v))
        assert DP.A is A
        assert iso(DP, I(A, v))


def test_dual_map_is_contravariant(alg, rng):
    A = alg("ext2")
    M = rg.random_module(A, rng, max_dim=5)
    N = rg.random_module(A, rng, max_dim=5)
    for f in mr.hom_basis(M, N)[:3]:
        Df = cn.dual_map(f)
        Df.validate()
        assert Df.dom.dims == N.dims and Df.cod.dims == M.dims


# -- triangular matrix algebras -------------------------------------------------------------

def test_triangular_with_zero_bimodule(alg):
    B, C = alg("loop2"), alg("a2")
    A = cn.triangular_matrix(B, C, cn.zero_bimodule(B, C))
    assert A.dim == B.dim + C.dim and A.nv == B.nv + C.nv
    assert A.loewy_length == max(B.loewy_length, C.loewy_length)


def test_triangular_k_k_k_is_a2(alg):
    k1, k2 = cn.field_algebra(101, "x"), cn.field_algebra(101, "y")
    A = cn.triangular_matrix(k1, k2, cn.left_bimodule(S(k1, 0), k2))
    assert A.dim == 3
    assert cn.structural_match(A, alg("a2"))


def test_triangular_rejects_bad_bimodule(alg):
    B = alg("loop2")
    k = cn.field_algebra(101)
    bm = cn.left_bimodule(P(B, 0), k)
    bm.left[1] = np.eye(2, dtype=np.int64)  # the loop acting as the identity is not nilpotent
    with pytest.raises(InvariantViolation):
        cn.triangular_matrix(B, k, bm)


def test_triangular_regular_bimodule(alg):
    B = alg("a2")
    A = cn.triangular_matrix(B, B, cn.regular_bimodule(B))
    assert A.dim == 3 * B.dim and A.nv == 2 * B.nv
    assert A.verify()


# -- one-point (co)extensions ------------------------------------------------------------------

def test_one_point_of_field_is_a2(alg):
    k = cn.field_algebra(101)
    A = cn.one_point(k, S(k, 0), "extension")
    assert cn.structural_match(A, alg("a2"))


def test_extension_of_fig3_is_fig2(alg):
    C = alg("fig3")
    assert cn.structural_match(cn.one_point(C, S(C, "1"), "extension"), alg("fig2"))


def test_coextensions_of_fig2(alg):
    B = alg("fig2")
    # by the uniserial P(2) the coextension matches the drawn figure
    assert cn.structural_match(cn.one_point(B, P(B, "2"), "coextension"), alg("fig1"))
    # by the simple S(1) it matches the figure with gamma*beta = 0 added
    A = cn.one_point(B, S(B, "1"), "coextension")
    assert A.dim == 12
    assert cn.structural_match(A, alg("fig1_gb"))
    assert not cn.structural_match(A, alg("fig1"))


def test_tails_reproduce_lambda(alg):
    L = cn.attach_tails(alg("fig1"), "2", "3", 2, 2)
    assert cn.structural_match(L, alg("lambda22"))
    assert L.nv == 7


def test_one_point_checks_module(alg):
    with pytest.raises(InvariantViolation):
        cn.one_point(alg("a2"), S(alg("a3"), 0))
    with pytest.raises(ValueError):
        cn.one_point(alg("a2"), S(alg("a2"), 0), side="sideways")


def _extension_radical_check(B, M):
    A = cn.one_point(B, M, "extension")
    new = A.new_vertex
    R = mr.layers(P(A, new)).rad
    assert A.nv == B.nv + 1
    vmap = A.base_vertex_map
    assert R.dims[new] == 0
    assert iso(cn.restrict_to_corner(A, R, B, vmap), M)


def _coextension_socle_check(B, M):
    A = cn.one_point(B, M, "coextension")
    new = A.new_vertex
    Inj = I(A, new)
    Q, _ = mr.cokernel(mr.layers(Inj).soc_incl)
    assert A.nv == B.nv + 1 and Q.dims[new] == 0
    assert iso(cn.restrict_to_corner(A, Q, B, A.base_vertex_map), M)


@pytest.mark.parametrize("name", ["a2", "loop2", "ext2", "fig3", "fig2"])
def test_new_vertex_structure(alg, name, rng):
    B = alg(name)
    for M in [S(B, 0), P(B, 0), rg.random_module(B, rng, max_dim=5)]:
        if M.dim == 0:
            continue
        _extension_radical_check(B, M)
        _coextension_socle_check(B, M)


# -- fingerprints -----------------------------------------------------------------------------

def test_fingerprint_of_field():
    assert cn.fingerprint(cn.field_algebra(101, "a")) == cn.fingerprint(cn.field_algebra(101, "b"))


def test_fingerprint_ignores_vertex_labels(alg):
    text = "vertices 2 1\narrow a: 2 -> 1\nnilpotency 2\n"
    A = build_based_algebra(parse_presentation(text))
    assert cn.structural_match(A, alg("a2"))


def test_fingerprint_exterior_vs_truncated_polynomial(alg):
    a, b = cn.fingerprint(alg("ext2")), cn.fingerprint(alg("loop3"))
    assert a.layers == (1, 2, 1) and b.layers == (1, 1, 1)
    assert not a.matches(b)


def test_fingerprint_is_canonical():
    C = np.array([[1, 2, 0], [0, 1, 0], [1, 0, 3]])
    perm = [2, 0, 1]
    form, exh = cn.canonical_cartan(C)
    assert exh and form == cn.canonical_cartan(C[np.ix_(perm, perm)])[0]


def test_present_round_trip(alg):
    A = cn.one_point(alg("fig3"), S(alg("fig3"), 0), "extension")
    text = cn.present_text(A, name="ext_fig3")
    again = build_based_algebra(parse_presentation(text))
    assert cn.structural_match(again, A)


# -- corollary consistency at certified points ------------------------------------------------

def test_certified_points_agree(alg):
    checked = 0
    for name in ["a2", "loop2", "nak2", "kron"]:
        B = alg(name)
        for side in ("extension", "coextension"):
            A = cn.one_point(B, S(B, 0), side)
            cb, ca = iv.certify_syzygy_finite(B), iv.certify_syzygy_finite(A)
            if cb.certified and ca.certified:
                rb, ra = iv.it_report(B).as_json(), iv.it_report(A).as_json()
                assert rb["upper"] == ra["upper"] == 0
                checked += 1
    assert checked > 0


# -- properties --------------------------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)
SMALL = ["a2", "a3", "kron", "loop2", "ext2", "nak2", "fig2", "fig3"]


@pytest.mark.parametrize("name", fixture_names())
def test_loewy_bounds_on_fixtures(alg, name):
    B = alg(name)
    k = cn.field_algebra(B.p, "w'")
    for A, lb, ub in [
        (cn.triangular_matrix(B, k, cn.left_bimodule(S(B, 0), k)), B.loewy_length, B.loewy_length + 1),
        (cn.triangular_matrix(B, k, cn.left_bimodule(P(B, 0), k)), B.loewy_length, B.loewy_length + 1),
        (cn.triangular_matrix(B, k, cn.zero_bimodule(B, k)), B.loewy_length, B.loewy_length + 1),
    ]:
        assert lb <= A.loewy_length <= ub


@settings(max_examples=50)
@given(st.sampled_from(SMALL), seeds)
def test_dual_reverses_series(alg, name, seed):
    A = alg(name)
    r = np.random.default_rng(seed)
    M = rg.random_module(A, r, max_dim=8)
    N = rg.random_module(A, r, max_dim=8)
    DM = cn.dual(M)
    assert DM.dim == M.dim
    assert mr.radical_series(DM) == tuple(M.dim - x for x in mr.socle_series(M))
    assert iso(cn.dual(DM), M)
    assert oracles.hom_dim(A, M, N) == len(mr.hom_basis(cn.dual(N), DM))


@settings(max_examples=20)
@given(st.sampled_from(["a2", "loop2", "ext2", "fig3"]), seeds)
def test_one_point_random_modules(alg, name, seed):
    B = alg(name)
    M = rg.random_module(B, np.random.default_rng(seed), max_dim=5)
    if M.dim == 0:
        return
    _extension_radical_check(B, M)
    _coextension_socle_check(B, M)
