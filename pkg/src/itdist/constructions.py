"""Opposite algebras, the duality D, triangular matrix algebras and one-point
(co)extensions, plus permutation-invariant algebra fingerprints.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .algebra import BasedAlgebra
from .errors import InvariantViolation, ResourceError
from .modrep import ModuleMap, ModuleRep, standard_module


def opposite(A: BasedAlgebra) -> BasedAlgebra:
    return A.opposite()


def dual(M: ModuleRep) -> ModuleRep:
    """D(M) = Hom_k(M, k) over the opposite algebra, in the dual basis."""
    Aop = M.A.opposite()
    out = ModuleRep(Aop, M.dims, [X.T.copy() for X in M.mats], check=False)
    if M.name:
        out.name = f"D({M.name})"
    return out


def dual_map(f: ModuleMap) -> ModuleMap:
    """D(f): D(N) -> D(M) for f: M -> N."""
    return ModuleMap(dual(f.cod), dual(f.dom), [X.T.copy() for X in f.mats])


def dual_map_between(f: ModuleMap, DN: ModuleRep, DM: ModuleRep) -> ModuleMap:
    """D(f) with prescribed domain/codomain objects (already dualized)."""
    return ModuleMap(DN, DM, [X.T.copy() for X in f.mats])


# ---------------------------------------------------------------------------
# bimodules

@dataclass
class Bimodule:
    """A B-C-bimodule on k^dim with a basis homogeneous for the idempotents.

    ``left[b]`` is the matrix of m -> b.m for each basis element b of B,
    ``right[c]`` the matrix of m -> m.c for each basis element c of C.
    ``tgt[i]`` (a B-vertex) and ``src[i]`` (a C-vertex) give e_tgt m_i e_src = m_i.
    """

    B: BasedAlgebra
    C: BasedAlgebra
    left: list
    right: list
    tgt: list
    src: list

    @property
    def dim(self) -> int:
        return len(self.tgt)

    def validate(self):
        p = self.B.p
        n = self.dim
        B, C = self.B, self.C
        for b in range(B.dim):
            for b2 in range(B.dim):
                lhs = la.matmul(self.left[b], self.left[b2], p)
                rhs = la.zeros(n, n)
                for k in np.flatnonzero(B.table[b, b2]):
                    rhs = (rhs + int(B.table[b, b2, k]) * self.left[k]) % p
                if not np.array_equal(lhs, rhs):
                    raise InvariantViolation("bimodule: left action is not a module structure")
        for c in range(C.dim):
            for c2 in range(C.dim):
                # m (c c2) = (m c) c2
                lhs = la.matmul(self.right[c2], self.right[c], p)
                rhs = la.zeros(n, n)
                for k in np.flatnonzero(C.table[c, c2]):
                    rhs = (rhs + int(C.table[c, c2, k]) * self.right[k]) % p
                if not np.array_equal(lhs, rhs):
                    raise InvariantViolation("bimodule: right action is not a module structure")
        for b in range(B.dim):
            for c in range(C.dim):
                if not np.array_equal(la.matmul(self.left[b], self.right[c], p),
                                      la.matmul(self.right[c], self.left[b], p)):
                    raise InvariantViolation("bimodule: left and right actions do not commute")
        for i in range(n):
            e = np.zeros(n, dtype=np.int64)
            e[i] = 1
            if not np.array_equal(self.left[B.idem[self.tgt[i]]] @ e % p, e):
                raise InvariantViolation("bimodule: basis is not homogeneous on the left")
            if not np.array_equal(self.right[C.idem[self.src[i]]] @ e % p, e):
                raise InvariantViolation("bimodule: basis is not homogeneous on the right")
        return True


def _vertex_offsets(dims):
    out = []
    for v, d in enumerate(dims):
        out += [v] * d
    return out


def left_bimodule(M: ModuleRep, C: BasedAlgebra) -> Bimodule:
    """A left B-module M viewed as a B-k-bimodule (C must be the field k)."""
    if C.nv != 1 or C.dim != 1:
        raise InvariantViolation("left_bimodule: right algebra must be the field")
    B = M.A
    left = [M.total_act(B.unit(b)) for b in range(B.dim)]
    return Bimodule(B, C, left, [la.eye(M.dim)], _vertex_offsets(M.dims), [0] * M.dim)


def right_dual_bimodule(M: ModuleRep, K: BasedAlgebra) -> Bimodule:
    """D(M) for a left B-module M, as a k-B-bimodule (K is the field k)."""
    if K.nv != 1 or K.dim != 1:
        raise InvariantViolation("right_dual_bimodule: left algebra must be the field")
    B = M.A
    right = [M.total_act(B.unit(b)).T.copy() for b in range(B.dim)]
    return Bimodule(K, B, [la.eye(M.dim)], right, [0] * M.dim, _vertex_offsets(M.dims))


def zero_bimodule(B: BasedAlgebra, C: BasedAlgebra) -> Bimodule:
    return Bimodule(B, C, [la.zeros(0, 0)] * B.dim, [la.zeros(0, 0)] * C.dim, [], [])


def regular_bimodule(B: BasedAlgebra) -> Bimodule:
    """B as a B-B-bimodule."""
    left = [B.lmat(B.unit(b)) for b in range(B.dim)]
    right = [B.rmat(B.unit(b)) for b in range(B.dim)]
    return Bimodule(B, B, left, right, [int(t) for t in B.tgt], [int(s) for s in B.src])


def field_algebra(p: int = 101, vertex: str = "w") -> BasedAlgebra:
    T = np.ones((1, 1, 1), dtype=np.int64)
    return BasedAlgebra(p, [vertex], [f"e{vertex}"], [0], [0], T, [0], [0], [], [[(1, ())]],
                        name="k", arrow_labels=())


# ---------------------------------------------------------------------------
# triangular matrix algebras

def _unique_names(first, second):
    taken = set(first)
    out = []
    for v in second:
        name = v
        k = 1
        while name in taken:
            name = f"{v}'{'' if k == 1 else k}"
            k += 1
        taken.add(name)
        out.append(name)
    return out


def triangular_matrix(B: BasedAlgebra, C: BasedAlgebra, M: Bimodule, name: str | None = None,
                      vertex_names=None, bimodule_labels=None, check: bool = True) -> BasedAlgebra:
    """The algebra [[B, M], [0, C]].

    Elements of M go from C-vertices to B-vertices, so that (with the product
    convention x*y = "y first") b*m = b.m and m*c = m.c.  B's vertices come
    first, then C's.
    """
    if B.p != C.p:
        raise InvariantViolation("triangular_matrix: algebras over different fields")
    if M.B is not B or M.C is not C:
        raise InvariantViolation("triangular_matrix: bimodule belongs to other algebras")
    if check:
        M.validate()
    p = B.p
    nb, nc, nm = B.dim, C.dim, M.dim
    n = nb + nc + nm
    vB, vC = B.nv, C.nv
    T = np.zeros((n, n, n), dtype=np.int64)
    oc, om = nb, nb + nc
    T[:nb, :nb, :nb] = B.table
    T[oc:om, oc:om, oc:om] = C.table
    for b in range(nb):
        T[b, om:, om:] = M.left[b].T
    for c in range(nc):
        T[om:, oc + c, om:] = M.right[c].T
    vnames = list(vertex_names) if vertex_names else list(B.vertices) + _unique_names(B.vertices, C.vertices)
    src = [int(s) for s in B.src] + [int(s) + vB for s in C.src] + [s + vB for s in M.src]
    tgt = [int(t) for t in B.tgt] + [int(t) + vB for t in C.tgt] + list(M.tgt)
    mlabels = list(bimodule_labels) if bimodule_labels else [f"m{i}" for i in range(nm)]
    clabels = _unique_names(B.labels, C.labels)
    labels = list(B.labels) + clabels + _unique_names(list(B.labels) + clabels, mlabels)
    idem = list(B.idem) + [oc + i for i in C.idem]
    # idempotent labels follow the vertex names
    for v, e in enumerate(idem):
        labels[e] = f"e{vnames[v]}"
    A = BasedAlgebra(p, vnames, labels, src, tgt, T, idem,
                     name=name or f"[{B.name},M;0,{C.name}]", composition=B.composition)
    if check:
        A.verify()
    A.blocks_of = {"B": list(range(nb)), "C": list(range(oc, om)), "M": list(range(om, n))}
    return A


def one_point(B: BasedAlgebra, M: ModuleRep, side: str = "extension", vertex: str | None = None,
              name: str | None = None, check: bool = True) -> BasedAlgebra:
    """One-point extension [[B, M],[0,k]] or coextension [[k, DM],[0,B]]."""
    if M.A is not B:
        raise InvariantViolation("one_point: module is not over the given algebra")
    if vertex is None:
        vertex = _fresh_vertex(B.vertices)
    k = field_algebra(B.p, vertex)
    if side == "extension":
        bm = left_bimodule(M, k)
        A = triangular_matrix(B, k, bm, name=name or f"{B.name}[M]",
                              vertex_names=list(B.vertices) + [vertex], check=check)
        A.new_vertex = B.nv
    elif side == "coextension":
        bm = right_dual_bimodule(M, k)
        A = triangular_matrix(k, B, bm, name=name or f"[M]{B.name}",
                              vertex_names=[vertex] + list(B.vertices), check=check)
        A.new_vertex = 0
    else:
        raise ValueError("side must be 'extension' or 'coextension'")
    A.base_vertex_map = {v: A.vertex_index(v) for v in B.vertices}
    return A


def attach_tails(A: BasedAlgebra, source: str, sink: str, n: int, m: int,
                 source_names=None, sink_names=None) -> BasedAlgebra:
    """n one-point extensions growing a path into ``source`` and m coextensions
    growing a path out of ``sink``.

    The i-th extension is by the indecomposable projective at the previous
    tail vertex (starting at ``source``), the j-th coextension by the
    indecomposable injective at the previous tail vertex (starting at ``sink``).
    """
    source_names = list(source_names or [f"p{i + 1}" for i in range(n)])
    sink_names = list(sink_names or [f"q{j + 1}" for j in range(m)])
    X = A
    prev = source
    for v in source_names[:n]:
        X = one_point(X, standard_module(X, "projective", prev), "extension", vertex=v)
        prev = v
    prev = sink
    for v in sink_names[:m]:
        X = one_point(X, standard_module(X, "injective", prev), "coextension", vertex=v)
        prev = v
    return X


def _fresh_vertex(vertices):
    ints = [int(v) for v in vertices if str(v).isdigit()]
    cand = str(max(ints) + 1) if ints else "w"
    while cand in vertices:
        cand += "'"
    return cand


def restrict_to_corner(A: BasedAlgebra, M: ModuleRep, B: BasedAlgebra, vmap) -> ModuleRep:
    """Restriction of an A-module to the corner algebra B, where B's vertex v
    sits at A-vertex vmap[v] and B's basis is a prefix-compatible subset
    (used for (co)extension bookkeeping; arrows matched by label)."""
    dims = [M.dims[vmap[v]] for v in B.vertices]
    mats = []
    for k, lab in enumerate(B.arrow_labels):
        b = B.arrows[k]
        idx = A.labels.index(B.labels[b])
        s, t = vmap[B.vertices[B.arrow_src[k]]], vmap[B.vertices[B.arrow_tgt[k]]]
        mats.append(M.act_elem(A.unit(idx), t, s))
    return ModuleRep(B, dims, mats)


# ---------------------------------------------------------------------------
# fingerprints

@dataclass(frozen=True)
class Fingerprint:
    dim: int
    simples: int
    cartan: tuple
    loewy: int
    layers: tuple
    exhaustive: bool = True

    def as_dict(self):
        return {"dim": self.dim, "simples": self.simples, "cartan": [list(r) for r in self.cartan],
                "loewy": self.loewy, "radical_layers": list(self.layers),
                "canonical_form_exhaustive": self.exhaustive}

    def matches(self, other: "Fingerprint") -> bool:
        return (self.dim, self.simples, self.cartan, self.loewy, self.layers) == \
            (other.dim, other.simples, other.cartan, other.loewy, other.layers)


def canonical_cartan(C: np.ndarray, cap: int = 200_000):
    """Lexicographically least form of C under simultaneous row/column permutation.

    Vertices are first grouped by a permutation-invariant profile; only
    permutations inside equal-profile groups are searched.  Returns (form, exhaustive).
    """
    C = np.asarray(C, dtype=np.int64)
    n = C.shape[0]
    if n == 0:
        return (), True
    prof = [(int(C[i, i]), tuple(sorted(C[i].tolist())), tuple(sorted(C[:, i].tolist()))) for i in range(n)]
    order = sorted(range(n), key=lambda i: prof[i])
    groups = [list(g) for _, g in itertools.groupby(order, key=lambda i: prof[i])]
    count = math.prod(math.factorial(len(g)) for g in groups)
    best = None
    if count <= cap:
        for combo in itertools.product(*(itertools.permutations(g) for g in groups)):
            perm = [i for g in combo for i in g]
            form = tuple(tuple(int(x) for x in C[np.ix_(perm, perm)][r]) for r in range(n))
            if best is None or form < best:
                best = form
        return best, True
    perm = order
    return tuple(tuple(int(x) for x in C[np.ix_(perm, perm)][r]) for r in range(n)), False


def fingerprint(A: BasedAlgebra) -> Fingerprint:
    form, exh = canonical_cartan(A.cartan())
    return Fingerprint(A.dim, A.nv, form, A.loewy_length, tuple(A.layer_dims), exh)


def structural_match(A: BasedAlgebra, B: BasedAlgebra) -> bool:
    """Equality of fingerprints (necessary for isomorphism, not sufficient)."""
    return fingerprint(A).matches(fingerprint(B))


# ---------------------------------------------------------------------------
# presentations of constructed algebras (best effort)

def present(A: BasedAlgebra, path_budget: int = 20_000):
    """Quiver and relations of A, extracted from arrows = rad/rad^2 basis.

    Returns a dict with vertices, arrows (label, source, target) and
    relations, each a list of (coefficient, word) with words function-style
    tuples of arrow labels.  Relations are kernel elements of the map from
    paths of length >= 2 into A that are not already in the ideal generated
    by shorter relations (computed up to length Loewy length).
    """
    p = A.p
    arrows = A.arrows
    labs = A.arrow_labels
    L = A.loewy_length
    asrc, atgt = A.arrow_src, A.arrow_tgt
    # paths by length, as (word, element)
    level = [((k,), A.unit(a)) for k, a in enumerate(arrows)]
    by_len = {1: level}
    total = len(level)
    for ln in range(2, L + 1):
        nxt = []
        for w, x in by_len[ln - 1]:
            for k, a in enumerate(arrows):
                if asrc[k] == atgt[w[0]]:
                    nxt.append(((k,) + w, A.mul(A.unit(a), x)))
        total += len(nxt)
        if total > path_budget:
            raise ResourceError("present: path budget exceeded")
        by_len[ln] = nxt
    words = [w for ln in range(2, L + 1) for w, _ in by_len[ln]]
    index = {w: i for i, w in enumerate(words)}
    vecs = {w: x for ln in range(2, L + 1) for w, x in by_len[ln]}
    relations = []
    ideal = la.zeros(len(words), 0)

    def close(rel):
        cols = []
        for u in [()] + [w for ln in range(1, L) for w, _ in by_len[ln]]:
            for v in [()] + [w for ln in range(1, L) for w, _ in by_len[ln]]:
                col = np.zeros(len(words), dtype=np.int64)
                ok = False
                for c, w in rel:
                    ww = u + w + v
                    if ww in index and _composable(ww, asrc, atgt):
                        col[index[ww]] = (col[index[ww]] + c) % p
                        ok = True
                if ok and col.any():
                    cols.append(col)
        return cols

    for ln in range(2, L + 1):
        group = [w for w, _ in by_len[ln]]
        for (t, s) in sorted({(atgt[w[0]], asrc[w[-1]]) for w in group}):
            ws = [w for w in group if atgt[w[0]] == t and asrc[w[-1]] == s]
            V = np.stack([vecs[w] for w in ws], axis=1)
            K = la.nullspace(V, p) if V.size else la.zeros(len(ws), 0)
            for j in range(K.shape[1]):
                col = np.zeros(len(words), dtype=np.int64)
                for i, w in enumerate(ws):
                    col[index[w]] = K[i, j]
                if la.in_span(ideal, col, p):
                    continue
                rel = [(int(K[i, j]), ws[i]) for i in range(len(ws)) if K[i, j]]
                relations.append(rel)
                new = close(rel)
                if new:
                    ideal = la.colspace(np.concatenate([ideal] + [c.reshape(-1, 1) for c in new], axis=1), p)
    return {
        "vertices": list(A.vertices),
        "arrows": [(labs[k], A.vertices[asrc[k]], A.vertices[atgt[k]]) for k in range(len(arrows))],
        "relations": [[(c, tuple(labs[k] for k in w)) for c, w in rel] for rel in relations],
        "nilpotency": L,
    }


def _composable(w, asrc, atgt):
    return all(asrc[w[i]] == atgt[w[i + 1]] for i in range(len(w) - 1))


def present_text(A: BasedAlgebra, name: str | None = None) -> str:
    """Presentation text (function-style) of ``present(A)``; J^L closes the ideal."""
    d = present(A)
    lines = [f"name {name or A.name}", f"field p={A.p}", "composition function",
             "vertices " + " ".join(d["vertices"])]
    for lab, s, t in d["arrows"]:
        lines.append(f"arrow {lab}: {s} -> {t}")
    for rel in d["relations"]:
        terms = " + ".join(f"{c}*{'*'.join(w)}" for c, w in rel)
        lines.append(f"relation {terms}")
    lines.append(f"relation J^{max(d['nilpotency'], 2)}")
    lines.append(f"nilpotency {max(d['nilpotency'], 2)}")
    return "\n".join(lines) + "\n"
