import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itdist import homology as ho
from itdist import invariants as iv
from itdist import modrep as mr
from itdist import randgen as rg
from itdist.errors import InvariantViolation

import oracles


def S(A, v):
    return mr.standard_module(A, "simple", v)


def P(A, v):
    return mr.standard_module(A, "projective", v)


# -- torsion radical ------------------------------------------------------------------

def test_torsion_radical_trivial_sets(alg, rng):
    A = alg("fig2")
    M = rg.random_module(A, rng, max_dim=8)
    assert iv.torsion_radical(M, ())[0].dim == M.dim
    assert iv.torsion_radical(M, A.vertices)[0].dim == 0


def test_torsion_radical_a2(alg):
    A = alg("a2")
    T, incl = iv.torsion_radical(P(A, "1"), ["2"])
    assert T.dim == 2 and incl.is_iso()
    assert iv.torsion_radical(S(A, "2"), ["2"])[0].dim == 0


# -- layer length -------------------------------------------------------------------------

def test_layer_length_z4():
    from itdist.registry import load_algebra
    assert iv.algebra_layer_length(load_algebra("z4")).value == 3


def test_layer_length_a2(alg):
    A = alg("a2")
    assert iv.layer_length(P(A, "1"), ["2"]).value == 1
    assert iv.layer_length(P(A, "2"), ["2"]).value == 0
    assert iv.algebra_layer_length(A, ["2"]).value == 1


def test_layer_length_of_zero(alg):
    A = alg("fig1")
    assert iv.layer_length(mr.zero_module(A), A.vertices[:1]).value == 0


def test_layer_length_unknown_vertex(alg):
    with pytest.raises(KeyError):
        iv.layer_length(S(alg("a2"), 0), ["9"])


# -- the upper bound ----------------------------------------------------------------------

@pytest.mark.parametrize("name, bound", [("z4", 1), ("ext2", 1), ("ext3", 2), ("a2", 0)])
def test_upper_bounds(alg, name, bound):
    ub = iv.it_upper_bound(alg(name))
    assert ub.bound == bound
    assert () in [r.V for r in ub.table]


def test_upper_bound_z4_uses_empty_set(alg):
    ub = iv.it_upper_bound(alg("z4"))
    assert ub.best_V == () and ub.exhaustive
    # z4 is self-injective: no simple has finite pd, so V = {} is the only option
    assert len(ub.table) == 1


def test_upper_bound_reports_finite_pd_sets(alg):
    ub = iv.it_upper_bound(alg("a3"))
    assert len(ub.table) == 8
    for row in ub.table:
        assert row.bound == max(row.layer_length - 2, 0)


def test_subset_budget_caps_enumeration(alg):
    ub = iv.it_upper_bound(alg("a3"), subset_budget=1)
    assert not ub.exhaustive
    assert [r.V for r in ub.table] == [(), ("1",), ("2",), ("3",), ("1", "2", "3")]


# -- Phi and Psi ----------------------------------------------------------------------------

def test_phi_of_projectives(alg):
    A = alg("fig2")
    r = iv.phi_psi([P(A, v) for v in range(A.nv)], cutoff=3)
    assert r.phi == 0 and r.psi == 0
    assert r.ranks == [0, 0, 0, 0]


def test_phi_dual_numbers(alg):
    r = iv.phi_psi([S(alg("loop2"), 0)], cutoff=5)
    assert r.phi == 0 and r.ranks == [1] * 6


def test_phi_a2(alg):
    A = alg("a2")
    r = iv.phi_psi([S(A, "1")], cutoff=4)
    assert r.ranks[:2] == [1, 0] and r.phi == 1 and r.psi == 1


def test_phi_psi_input_checks(alg):
    with pytest.raises(ValueError):
        iv.phi_psi([])
    with pytest.raises(ValueError):
        iv.phi_psi([S(alg("a2"), 0)], cutoff=0)


def test_psi_selfinjective_is_phi(alg):
    r = iv.phi_psi([S(alg("ext2"), 0)], cutoff=3)
    assert r.phi == 0 and r.psi == 0


# -- certificates -----------------------------------------------------------------------

def test_semisimple_certificate(alg):
    c = iv.certify_syzygy_finite(alg("semisimple2"))
    g = c.get("finite-gldim")
    assert g is not None and g.n == 0


def test_nakayama_monomial_certificate(alg):
    c = iv.certify_syzygy_finite(alg("nak2"))
    m = c.get("monomial-ZH")
    assert m is not None and m.n == 2
    # cyclic path modules: two simples and two projectives; only the simples are non-projective
    assert sorted(X.dims for X in m.catalogue) == [(0, 1), (1, 0)]
    assert m.verify()


def test_dual_numbers_closure_certificate(alg):
    A = alg("loop2")
    c = iv.certify_syzygy_finite(A)
    cl = c.get("closure")
    assert cl is not None and len(cl.catalogue) == 1
    assert mr.is_isomorphic(cl.catalogue[0], S(A, 0))[0]


def test_no_certificate_leaves_evidence(alg):
    c = iv.certify_syzygy_finite(alg("z4"), depth=2)
    assert not c.certified
    assert c.primary is None
    assert any(e.reason.startswith("closure") for e in c.evidence)


def test_certificate_depth_check(alg):
    with pytest.raises(ValueError):
        iv.certify_syzygy_finite(alg("a2"), depth=0)


@pytest.mark.parametrize("name", ["a2", "a3", "kron", "loop2", "loop3", "nak2", "k", "ext1"])
def test_certificates_reverify(alg, name):
    c = iv.certify_syzygy_finite(alg(name))
    assert c.certified
    for cert in c.certificates:
        assert cert.verify(seed=7)
        for X in cert.catalogue:
            for Y, _ in mr.decompose(ho.syzygy(X)).classes:
                assert mr.is_projective(Y) or any(mr.is_isomorphic(Y, Z)[0] for Z in cert.catalogue)


# -- weak resolution witnesses --------------------------------------------------------------

def test_wrd_member_has_length_zero(alg):
    A = alg("ext2")
    U = S(A, 0)
    (w,), classes = iv.wrd_search(U, [U])
    assert w.found and w.length == 0 and w.verify(classes)


def test_wrd_regular_module_is_a_resolution(alg, rng):
    A = alg("a3")
    R = ho.regular_module(A)
    for _ in range(5):
        X = rg.random_module(A, rng, max_dim=6)
        (w,), classes = iv.wrd_search(R, [X], maxlen=3)
        assert w.found == (ho.pd(X, 3).value is not None)
        if w.found:
            assert w.verify(classes)
            assert w.length <= ho.pd(X).value + 1


def test_wrd_regular_fails_on_infinite_pd(alg):
    A = alg("loop2")
    (w,), _ = iv.wrd_search(ho.regular_module(A), [S(A, 0)], maxlen=2)
    assert not w.found and w.length is None
    assert "no certificate" in w.reason


def test_wrd_exterior_omega(alg, rng):
    A = alg("ext2")
    P0 = P(A, 0)
    U = mr.direct_sum([S(A, 0), mr.layers(P0).rad])[0]
    for _ in range(20):
        M = rg.random_module(A, rng, max_dim=6)
        (w,), classes = iv.wrd_search(U, [ho.syzygy(M)], maxlen=1)
        assert w.found and w.length <= 1
        assert w.verify(classes)


# -- report ------------------------------------------------------------------------------

def test_report_dual_numbers(alg):
    r = iv.it_report(alg("loop2")).as_json()
    assert r["upper"] == 0 and r["verdict"] == "IT.dist = 0 (certified)"


def test_report_exterior(alg):
    r = iv.it_report(alg("ext2"), reference="IT.dist = 1").as_json()
    assert r["upper"] == 1 and r["lower"] == 0
    assert any("self-injective" in n for n in r["notes"])
    assert r["reference"] == "IT.dist = 1"
    assert r["inequality"] == "dim D_sg(A) <= 1"


def test_report_z4(alg):
    A = alg("z4")
    r = iv.it_report(A).as_json()
    assert (r["lower"], r["upper"]) == (0, 1)
    r = iv.it_report(A, external_assertions=["not-syzygy-finite"])
    d = r.as_json()
    assert (d["lower"], d["upper"]) == (1, 1)
    assert d["verdict"] == "IT.dist(A)=1"
    assert "external-assertion: not-syzygy-finite" in r.text()


def test_report_schema(alg):
    d = iv.it_report(alg("a2")).as_json()
    for key in ["algebra", "loewy", "bounds", "certificates", "phi_psi", "gorenstein", "verdict",
                "external_assertions", "composition_convention", "seed"]:
        assert key in d
    assert d["lower"] <= d["upper"]
    for row in d["bounds"]:
        assert row["bound"] == max(row["layer_length"] - 2, 0)


def test_report_rejects_contradicting_assertion(alg):
    with pytest.raises(InvariantViolation):
        iv.it_report(alg("loop2"), external_assertions=["not-syzygy-finite"])
    with pytest.raises(ValueError):
        iv.it_report(alg("loop2"), external_assertions=["bogus"])


# -- properties ----------------------------------------------------------------------------

FIXTURES = ["a2", "a3", "kron", "loop2", "ext2", "nak2", "fig2", "fig3", "z4"]
HEREDITARY = ["a2", "a3", "kron"]
seeds = st.integers(0, 2**32 - 1)


def _random_V(A, r):
    return [A.vertices[v] for v in range(A.nv) if r.integers(0, 2)]


@settings(max_examples=100)
@given(st.sampled_from(FIXTURES), seeds)
def test_torsion_pair_axioms(alg, name, seed):
    A = alg(name)
    r = np.random.default_rng(seed)
    M = rg.random_module(A, r, max_dim=7)
    N = rg.random_module(A, r, max_dim=5)
    V = _random_V(A, r)
    T, incl = iv.torsion_radical(M, V)
    Q, _ = mr.cokernel(incl)
    assert mr.hom_basis(T, Q) == []
    assert iv.torsion_radical(T, V)[0].dim == T.dim
    assert iv.torsion_radical(Q, V)[0].dim == 0
    Vs = {A.vertex_index(v) for v in V}
    assert all(Q.dims[v] == 0 for v in range(A.nv) if v not in Vs)
    MN = mr.direct_sum([M, N])[0]
    TN = iv.torsion_radical(N, V)[0]
    assert mr.is_isomorphic(iv.torsion_radical(MN, V)[0], mr.direct_sum([T, TN], A)[0])[0]


@settings(max_examples=100)
@given(st.sampled_from(FIXTURES), seeds)
def test_empty_layer_length_is_loewy_length(alg, name, seed):
    A = alg(name)
    M = rg.random_module(A, np.random.default_rng(seed), max_dim=10)
    assert iv.layer_length(M, ()).value == oracles.loewy_length(A, M)


@settings(max_examples=60)
@given(st.sampled_from(FIXTURES), seeds)
def test_layer_chain_decreases(alg, name, seed):
    A = alg(name)
    r = np.random.default_rng(seed)
    M = rg.random_module(A, r, max_dim=10)
    res = iv.layer_length(M, _random_V(A, r))
    dims = res.chain_dims
    assert dims[-1] == 0 and len(dims) == res.value + 1
    nz = [d for d in dims if d]
    assert all(a > b for a, b in zip(nz, nz[1:]))


@settings(max_examples=50)
@given(st.sampled_from(HEREDITARY), seeds)
def test_phi_equals_pd_on_hereditary(alg, name, seed):
    A = alg(name)
    M = rg.random_module(A, np.random.default_rng(seed), max_dim=6)
    if M.dim == 0:
        return
    res = iv.phi_psi([M], cutoff=4)
    assert all(a >= b for a, b in zip(res.ranks, res.ranks[1:]))
    d = ho.pd(M, 4)
    assert d.known and res.phi == d.value


@settings(max_examples=20)
@given(st.sampled_from(["a2", "a3", "ext2", "loop2", "fig2"]), seeds)
def test_wrd_witnesses_reverify(alg, name, seed):
    A = alg(name)
    r = np.random.default_rng(seed)
    U = rg.random_module(A, r, max_dim=5)
    targets = [rg.random_module(A, r, max_dim=5) for _ in range(2)]
    ws, classes = iv.wrd_search(U, targets, maxlen=2)
    for w in ws:
        if w.found:
            assert w.verify(classes)
