import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itdist.algebra import build_based_algebra
from itdist.errors import NonAdmissible, ParseError
from itdist.presentation import (complete_rewriting, load_presentation, normal_form,
                                 parse_presentation, presentation_text)
from itdist.registry import fixture_names, resolve_path

from oracles import algebra_summary, exterior_normal_monomials

# (dim, radical layer dims, Loewy length), frozen from oracles.algebra_summary
FROZEN = {
    "a2": (3, [2, 1], 2),
    "a3": (6, [3, 2, 1], 3),
    "ext1": (2, [1, 1], 2),
    "ext2": (4, [1, 2, 1], 3),
    "ext3": (8, [1, 3, 3, 1], 4),
    "fig1": (13, [3, 5, 4, 1], 4),
    "fig1_gb": (12, [3, 5, 3, 1], 4),
    "fig2": (10, [2, 4, 3, 1], 4),
    "fig3": (8, [1, 3, 3, 1], 4),
    "k": (1, [1], 1),
    "kron": (4, [2, 2], 2),
    "lambda22": (35, [7, 9, 8, 5, 3, 2, 1], 7),
    "loop2": (2, [1, 1], 2),
    "loop3": (3, [1, 1, 1], 3),
    "nak2": (4, [2, 2], 2),
    "semisimple2": (2, [2], 1),
    "z4": (60, [4, 16, 40], 3),
}

LOOP = """
field p=101
vertices v
arrow x: v -> v
relation x*x
nilpotency 2
"""

EXT2 = """
vertices v
arrow x: v -> v
arrow y: v -> v
relation x*x
relation y*y
relation x*y + y*x
nilpotency 3
"""


def test_every_fixture_is_frozen():
    assert sorted(FROZEN) == fixture_names()


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_fixture_dimensions(alg, name):
    A = alg(name)
    dim, layers, ll = FROZEN[name]
    assert A.dim == dim
    assert list(A.layer_dims) == layers
    assert A.loewy_length == ll


@pytest.mark.parametrize("name", ["a2", "ext2", "fig2", "kron", "nak2", "z4"])
def test_oracle_reproduces_frozen_values(alg, name):
    pres = load_presentation(resolve_path(name))
    dim, layers, ll, cartan = algebra_summary(pres)
    assert (dim, layers, ll) == FROZEN[name]
    C = alg(name).cartan()
    for t in range(C.shape[0]):
        for s in range(C.shape[1]):
            assert C[t, s] == cartan.get((t, s), 0)


def test_parse_smallest():
    pres = parse_presentation(LOOP)
    assert len(pres.quiver.vertices) == 1
    assert len(pres.quiver.arrows) == 1
    assert len(pres.relations) == 1
    assert pres.nilpotency == 2


def test_parse_figure3_counts():
    pres = load_presentation(resolve_path("fig3"))
    assert len(pres.quiver.arrows) == 3
    assert len(pres.relations) == 6


def test_non_parallel_relation_is_rejected():
    text = """
vertices 1 2 3
arrow a: 1 -> 2
arrow b: 1 -> 3
arrow c: 2 -> 2
arrow d: 3 -> 3
relation c*a + d*b
nilpotency 3
"""
    with pytest.raises(ParseError, match="non-parallel"):
        parse_presentation(text)


@pytest.mark.parametrize("text, needle", [
    ("vertices 1\narrow a: 1 -> 2\nnilpotency 2\n", "unknown vertex"),
    ("vertices 1\narrow a: 1 -> 1\nrelation a\nnilpotency 2\n", "length"),
    ("vertices 1\narrow a: 1 -> 1\nrelation b*b\nnilpotency 2\n", "unknown"),
    ("vertices 1\nfield p=100\nnilpotency 2\n", "prime"),
    ("vertices 1\nnilpotency 1\n", "nilpotency"),
    ("vertices 1\nbogus line\nnilpotency 2\n", ""),
])
def test_parse_errors(text, needle):
    with pytest.raises(ParseError) as e:
        parse_presentation(text)
    assert needle in str(e.value)


def test_parse_error_carries_line():
    with pytest.raises(ParseError) as e:
        parse_presentation("vertices 1\narrow a: 1 -> 1\nrelation a*\nnilpotency 2\n", source="t.alg")
    assert e.value.line == 3
    assert "t.alg:3" in str(e.value)


def test_comments_and_whitespace():
    text = "# comment\n  vertices   v   \narrow   x :v->v  # trailing\nrelation x * x\nnilpotency 2\n"
    A = build_based_algebra(parse_presentation(text))
    assert A.dim == 2


def test_rewriting_square_zero():
    rs = complete_rewriting(parse_presentation(LOOP))
    assert normal_form({(0, 0): 1}, rs) == {}
    assert build_based_algebra(parse_presentation(LOOP)).dim == 2


def test_exterior_normal_monomials():
    pres = parse_presentation(EXT2)
    A = build_based_algebra(pres)
    assert A.dim == len(exterior_normal_monomials(2)) == 4
    assert list(A.layer_dims) == [1, 2, 1]
    rs = complete_rewriting(pres)
    x, y = 0, 1
    # internal words are function-style: "y*x" is the word (y, x)
    assert normal_form({(y, x): 1}, rs) == {(x, y): 100}


def test_z4_rewrite_orientation():
    pres = load_presentation(resolve_path("z4"))
    rs = complete_rewriting(pres)
    idx = pres.quiver.aindex
    # abar_1 abar_2 (read left to right) rewrites to alpha_1 alpha_2
    w = (idx["ab2"], idx["ab1"])
    assert normal_form({w: 1}, rs) == {(idx["a2"], idx["a1"]): 1}
    assert max(len(u) for u in rs.normal_words()) <= 2


def test_diagrammatic_flag_flips_reading():
    text = "vertices 1 2 3\narrow a: 1 -> 2\narrow b: 2 -> 3\nrelation {}\nnilpotency 3\n"
    assert build_based_algebra(parse_presentation(text.format("b*a"))).dim == 5
    with pytest.raises(ParseError):
        parse_presentation(text.format("b*a"), composition="diagrammatic")
    A = build_based_algebra(parse_presentation(text.format("a*b"), composition="diagrammatic"))
    assert A.dim == 5


def test_non_admissible_names_a_witness():
    text = "vertices v\narrow x: v -> v\nnilpotency 3\n"
    with pytest.raises(NonAdmissible, match="x\\*x\\*x"):
        build_based_algebra(parse_presentation(text))


def test_presentation_text_round_trip(alg):
    for name in ["a3", "ext2", "fig1", "z4"]:
        pres = load_presentation(resolve_path(name))
        again = parse_presentation(presentation_text(pres))
        assert build_based_algebra(again).dim == alg(name).dim


@pytest.mark.parametrize("name", ["ext2", "fig1", "z4", "nak2", "loop3"])
def test_algebra_invariants(alg, name):
    A = alg(name)
    assert A.verify()
    C = A.cartan()
    assert int(C.sum()) == A.dim
    one = sum(A.unit(A.idem[v]) for v in range(A.nv)) % A.p
    for b in range(A.dim):
        x = A.unit(b)
        assert np.array_equal(A.mul(one, x), x) and np.array_equal(A.mul(x, one), x)
    assert A.loewy_length == 1 + max(A.degree)


def _random_elements(A, rng, k):
    return [rng.integers(0, A.p, size=A.dim) for _ in range(k)]


@pytest.mark.parametrize("name", ["ext3", "fig1", "z4"])
def test_associativity_random_triples(alg, name):
    A = alg(name)
    rng = np.random.default_rng(7)
    for _ in range(200):
        x, y, z = _random_elements(A, rng, 3)
        assert np.array_equal(A.mul(A.mul(x, y), z), A.mul(x, A.mul(y, z)))


@st.composite
def fixture_poly(draw, names=("ext3", "fig1", "z4", "lambda22")):
    name = draw(st.sampled_from(names))
    pres = load_presentation(resolve_path(name))
    src, tgt = pres.src_table, pres.tgt_table
    words = []
    for _ in range(draw(st.integers(1, 4))):
        a = draw(st.integers(0, len(src) - 1))
        w = (a,)
        for _ in range(draw(st.integers(0, pres.nilpotency))):
            nxt = [b for b in range(len(src)) if src[b] == tgt[w[0]]]
            if not nxt:
                break
            w = (draw(st.sampled_from(nxt)),) + w
        words.append(w)
    coeffs = [draw(st.integers(1, pres.p - 1)) for _ in words]
    return name, pres, dict(zip(words, coeffs))


_RS = {}


def _rs(name, pres):
    if name not in _RS:
        _RS[name] = complete_rewriting(pres)
    return _RS[name]


@settings(max_examples=1000)
@given(fixture_poly())
def test_normal_form_is_a_projection(data):
    name, pres, poly = data
    rs = _rs(name, pres)
    nf = normal_form(poly, rs)
    assert normal_form(nf, rs) == nf
    assert all(rs.is_normal(w) for w in nf)


@settings(max_examples=500)
@given(fixture_poly())
def test_reduction_order_does_not_matter(data):
    name, pres, poly = data
    rs = _rs(name, pres)
    assert rs.normal_form(poly) == rs.normal_form(poly, rightmost=True)


@settings(max_examples=200)
@given(fixture_poly(), st.integers(1, 100))
def test_normal_form_is_linear(data, c):
    name, pres, poly = data
    rs = _rs(name, pres)
    scaled = {w: (c * k) % pres.p for w, k in poly.items()}
    expect = {w: (c * k) % pres.p for w, k in normal_form(poly, rs).items()}
    assert normal_form(scaled, rs) == {w: k for w, k in expect.items() if k}
