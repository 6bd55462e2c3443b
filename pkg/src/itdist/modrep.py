"""Left modules as quiver representations, their maps and decompositions.

A module M over a based algebra A is a list of per-vertex dimensions
together with one matrix per arrow, ``mats[k]`` mapping M_{src} to
M_{tgt} for the k-th arrow of A.  Vectors in "total" coordinates
concatenate the vertex components in vertex order.

Submodules are described by per-vertex column bases (lists of matrices
in M_v coordinates).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from .algebra import BasedAlgebra
from .errors import InvariantViolation, ParseError, ResourceError


def _cols(B, rows: int) -> np.ndarray:
    """Coerce a basis to an int64 matrix with ``rows`` rows (empty allowed)."""
    B = np.asarray(B, dtype=np.int64)
    if B.size == 0:
        return np.zeros((rows, 0), dtype=np.int64)
    return B.reshape(rows, -1)


class ModuleRep:
    def __init__(self, algebra: BasedAlgebra, dims, mats, check: bool = True, name: str | None = None):
        self.A = algebra
        self.p = algebra.p
        self.dims = tuple(int(d) for d in dims)
        self.name = name
        if len(self.dims) != algebra.nv:
            raise InvariantViolation("module: one dimension per vertex required")
        A = algebra
        mm = []
        for k, M in enumerate(mats):
            M = np.asarray(M, dtype=np.int64).reshape(self.dims[A.arrow_tgt[k]], self.dims[A.arrow_src[k]]) % self.p
            mm.append(M)
        if len(mm) != len(A.arrows):
            raise InvariantViolation("module: one matrix per arrow required")
        self.mats = tuple(mm)
        self._memo = {}
        if check:
            self.validate()

    # -- sizes -------------------------------------------------------------
    @property
    def dim(self) -> int:
        return sum(self.dims)

    @property
    def dimvec(self):
        return self.dims

    @cached_property
    def offsets(self):
        off = [0]
        for d in self.dims:
            off.append(off[-1] + d)
        return tuple(off)

    def is_zero(self) -> bool:
        return self.dim == 0

    # -- action ------------------------------------------------------------
    def word_mat(self, w) -> np.ndarray:
        hit = self._memo.get(w)
        if hit is not None:
            return hit
        if len(w) == 1:
            out = self.mats[w[0]]
        else:
            out = la.matmul(self.mats[w[0]], self.word_mat(w[1:]), self.p)
        self._memo[w] = out
        return out

    def act(self, b: int) -> np.ndarray:
        """Matrix of the basis element b: M_{src b} -> M_{tgt b}."""
        key = ("b", b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        A = self.A
        s, t = int(A.src[b]), int(A.tgt[b])
        if b in A.idem:
            out = la.eye(self.dims[s])
        else:
            out = la.zeros(self.dims[t], self.dims[s])
            for c, w in A.words[b]:
                out = (out + c * self.word_mat(w)) % self.p
        self._memo[key] = out
        return out

    def act_elem(self, x, t: int, s: int) -> np.ndarray:
        """Action of the element x (restricted to its e_t A e_s part)."""
        out = la.zeros(self.dims[t], self.dims[s])
        for b in self.A.block(t, s):
            if x[b] % self.p:
                out = (out + int(x[b]) * self.act(b)) % self.p
        return out

    def total_act(self, x) -> np.ndarray:
        out = la.zeros(self.dim, self.dim)
        o = self.offsets
        for b in np.flatnonzero(np.asarray(x) % self.p):
            b = int(b)
            s, t = int(self.A.src[b]), int(self.A.tgt[b])
            out[o[t]:o[t + 1], o[s]:o[s + 1]] += int(x[b]) * self.act(b)
        return out % self.p

    def validate(self):
        """rho(a) rho(b) = rho(a*b) for all arrows a and basis elements b."""
        A = self.A
        for k, a in enumerate(A.arrows):
            s_a = A.arrow_src[k]
            t_a = A.arrow_tgt[k]
            for b in range(A.dim):
                if int(A.tgt[b]) != s_a:
                    continue
                s_b = int(A.src[b])
                lhs = la.matmul(self.mats[k], self.act(b), self.p)
                rhs = self.act_elem(A.table[a, b], t_a, s_b)
                if not np.array_equal(lhs, rhs):
                    raise InvariantViolation(
                        f"module {self.name or ''}: relation check fails for arrow "
                        f"{A.arrow_labels[k]} times {A.labels[b]}")
        return True

    # -- misc ----------------------------------------------------------------
    def __repr__(self):
        return f"ModuleRep(dims={self.dims})"

    def conjugate(self, gs) -> "ModuleRep":
        """The module with basis change g_v at each vertex (g_v invertible)."""
        A = self.A
        inv = [la.inverse(g, self.p) for g in gs]
        mats = [la.mmul(self.p, gs[A.arrow_tgt[k]], M, inv[A.arrow_src[k]]) for k, M in enumerate(self.mats)]
        return ModuleRep(A, self.dims, mats, check=False)


class ModuleMap:
    def __init__(self, dom: ModuleRep, cod: ModuleRep, mats, check: bool = False):
        if dom.A is not cod.A:
            raise InvariantViolation("module map between modules over different algebras")
        self.dom = dom
        self.cod = cod
        self.p = dom.p
        self.mats = tuple(np.asarray(M, dtype=np.int64).reshape(cod.dims[v], dom.dims[v]) % self.p
                          for v, M in enumerate(mats))
        if check:
            self.validate()

    @property
    def A(self):
        return self.dom.A

    def validate(self):
        A = self.A
        for k in range(len(A.arrows)):
            s, t = A.arrow_src[k], A.arrow_tgt[k]
            lhs = la.matmul(self.mats[t], self.dom.mats[k], self.p)
            rhs = la.matmul(self.cod.mats[k], self.mats[s], self.p)
            if not np.array_equal(lhs, rhs):
                raise InvariantViolation(f"map does not commute with arrow {A.arrow_labels[k]}")
        return True

    def total(self) -> np.ndarray:
        out = la.zeros(self.cod.dim, self.dom.dim)
        oc, od = self.cod.offsets, self.dom.offsets
        for v, M in enumerate(self.mats):
            out[oc[v]:oc[v + 1], od[v]:od[v + 1]] = M
        return out

    def is_zero(self) -> bool:
        return all(not M.any() for M in self.mats)

    def is_iso(self) -> bool:
        return all(M.shape[0] == M.shape[1] and la.is_invertible(M, self.p) for M in self.mats)

    def rank(self) -> int:
        return sum(la.rank(M, self.p) for M in self.mats)

    def __add__(self, other):
        return ModuleMap(self.dom, self.cod, [(a + b) % self.p for a, b in zip(self.mats, other.mats)])

    def scale(self, c):
        return ModuleMap(self.dom, self.cod, [(c * a) % self.p for a in self.mats])

    def __neg__(self):
        return self.scale(-1)

    def inverse(self):
        return ModuleMap(self.cod, self.dom, [la.inverse(M, self.p) for M in self.mats])


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """g after f."""
    if f.cod is not g.dom and f.cod.dims != g.dom.dims:
        raise InvariantViolation("compose: codomain/domain mismatch")
    return ModuleMap(f.dom, g.cod, [la.matmul(G, F, f.p) for G, F in zip(g.mats, f.mats)])


def identity(M: ModuleRep) -> ModuleMap:
    return ModuleMap(M, M, [la.eye(d) for d in M.dims])


def zero_map(M: ModuleRep, N: ModuleRep) -> ModuleMap:
    return ModuleMap(M, N, [la.zeros(N.dims[v], M.dims[v]) for v in range(M.A.nv)])


def zero_module(A: BasedAlgebra) -> ModuleRep:
    return ModuleRep(A, [0] * A.nv, [la.zeros(0, 0) for _ in A.arrows], check=False)


# ---------------------------------------------------------------------------
# standard modules

def _projective(A: BasedAlgebra, v: int) -> ModuleRep:
    cache = A.__dict__.setdefault("_proj_cache", {})
    if v in cache:
        return cache[v]
    blocks = A.by_source[v]
    dims = [len(blocks[t]) for t in range(A.nv)]
    mats = []
    for k, a in enumerate(A.arrows):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        cols = blocks[s]
        rows = list(blocks[t])
        M = A.table[a][np.ix_(list(cols), rows)].T if cols and rows else la.zeros(len(rows), len(cols))
        mats.append(M)
    P = ModuleRep(A, dims, mats, check=False, name=f"P({A.vertices[v]})")
    cache[v] = P
    return P


def standard_module(A: BasedAlgebra, kind: str, v) -> ModuleRep:
    """P(v), S(v) or I(v); ``kind`` is 'projective', 'simple' or 'injective'."""
    vi = A.vertex_index(v)
    if kind in ("projective", "P"):
        return _projective(A, vi)
    if kind in ("simple", "S"):
        dims = [0] * A.nv
        dims[vi] = 1
        mats = [la.zeros(dims[A.arrow_tgt[k]], dims[A.arrow_src[k]]) for k in range(len(A.arrows))]
        return ModuleRep(A, dims, mats, check=False, name=f"S({A.vertices[vi]})")
    if kind in ("injective", "I"):
        from .constructions import dual

        M = dual(_projective(A.opposite(), vi))
        M.name = f"I({A.vertices[vi]})"
        return M
    raise ValueError(f"unknown module kind {kind!r}")


def proj_sum(A: BasedAlgebra, verts) -> ModuleRep:
    """P(v_1) + ... + P(v_m), with basis ordered summand by summand."""
    if not verts:
        return zero_module(A)
    parts = [_projective(A, int(v)) for v in verts]
    dims = [sum(P.dims[w] for P in parts) for w in range(A.nv)]
    mats = []
    for k in range(len(A.arrows)):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        B = la.zeros(dims[t], dims[s])
        r = c = 0
        for P in parts:
            B[r:r + P.dims[t], c:c + P.dims[s]] = P.mats[k]
            r += P.dims[t]
            c += P.dims[s]
        mats.append(B)
    return ModuleRep(A, dims, mats, check=False)


# ---------------------------------------------------------------------------
# direct sums

def direct_sum(mods, A: BasedAlgebra | None = None):
    """Return (S, injections, projections)."""
    mods = list(mods)
    if not mods:
        if A is None:
            raise InvariantViolation("direct sum of an empty list needs the algebra")
        Z = zero_module(A)
        return Z, [], []
    A = mods[0].A
    for M in mods:
        if M.A is not A:
            raise InvariantViolation("direct sum of modules over different algebras")
    p = A.p
    dims = [sum(M.dims[v] for M in mods) for v in range(A.nv)]
    mats = []
    for k in range(len(A.arrows)):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        B = la.zeros(dims[t], dims[s])
        r = c = 0
        for M in mods:
            B[r:r + M.dims[t], c:c + M.dims[s]] = M.mats[k]
            r += M.dims[t]
            c += M.dims[s]
        mats.append(B)
    S = ModuleRep(A, dims, mats, check=False)
    inj, proj = [], []
    start = [0] * A.nv
    for M in mods:
        im, pm = [], []
        for v in range(A.nv):
            E = la.zeros(dims[v], M.dims[v])
            E[start[v]:start[v] + M.dims[v], :] = la.eye(M.dims[v])
            im.append(E)
            pm.append(E.T.copy())
            start[v] += M.dims[v]
        inj.append(ModuleMap(M, S, im))
        proj.append(ModuleMap(S, M, pm))
    return S, inj, proj


def direct_sum_maps(maps, dom: ModuleRep | None = None, cod: ModuleRep | None = None):
    """Block-diagonal sum of maps f_i: M_i -> N_i, between the direct sums."""
    A = maps[0].A
    D = dom or direct_sum([f.dom for f in maps])[0]
    C = cod or direct_sum([f.cod for f in maps])[0]
    out = []
    for v in range(A.nv):
        B = la.zeros(C.dims[v], D.dims[v])
        r = c = 0
        for f in maps:
            B[r:r + f.cod.dims[v], c:c + f.dom.dims[v]] = f.mats[v]
            r += f.cod.dims[v]
            c += f.dom.dims[v]
        out.append(B)
    return ModuleMap(D, C, out)


# ---------------------------------------------------------------------------
# submodules, quotients, kernels

def submodule(M: ModuleRep, bases):
    """(S, inclusion) for the submodule with per-vertex column bases."""
    A = M.A
    p = M.p
    bases = [_cols(B, M.dims[v]) for v, B in enumerate(bases)]
    dims = [B.shape[1] for B in bases]
    mats = []
    for k in range(len(A.arrows)):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        img = la.matmul(M.mats[k], bases[s], p)
        if dims[t] == 0:
            if img.any():
                raise InvariantViolation("submodule bases are not closed under the action")
            mats.append(la.zeros(0, dims[s]))
            continue
        try:
            mats.append(la.solve(bases[t], img, p))
        except ValueError:
            raise InvariantViolation("submodule bases are not closed under the action") from None
    S = ModuleRep(A, dims, mats, check=False)
    return S, ModuleMap(S, M, bases)


def quotient(M: ModuleRep, bases):
    """(Q, projection) for M modulo the submodule with the given bases."""
    A = M.A
    p = M.p
    QR = [la.projector_mod(_cols(B, M.dims[v]), M.dims[v], p)
          for v, B in enumerate(bases)]
    dims = [Q.shape[0] for Q, _ in QR]
    mats = []
    for k in range(len(A.arrows)):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        mats.append(la.mmul(p, QR[t][0], M.mats[k], QR[s][1]) if dims[t] and dims[s]
                    else la.zeros(dims[t], dims[s]))
    Q = ModuleRep(A, dims, mats, check=False)
    return Q, ModuleMap(M, Q, [q for q, _ in QR])


def generated_bases(M: ModuleRep, gens):
    """Per-vertex bases of the submodule generated by (vertex, vector) pairs."""
    A = M.A
    p = M.p
    cols = [[] for _ in range(A.nv)]
    for v, x in gens:
        x = np.asarray(x, dtype=np.int64).reshape(-1, 1)
        for t in range(A.nv):
            for b in A.block(t, v):
                y = la.matmul(M.act(b), x, p)
                if y.any():
                    cols[t].append(y)
    return [la.colspace(np.concatenate(c, axis=1), p) if c else la.zeros(M.dims[t], 0)
            for t, c in enumerate(cols)]


def span_closure(M: ModuleRep, bases):
    """Smallest submodule containing the given per-vertex subspaces."""
    gens = []
    for v, B in enumerate(bases):
        B = _cols(B, M.dims[v])
        gens.extend((v, B[:, j]) for j in range(B.shape[1]))
    return generated_bases(M, gens)


def sum_bases(M, *bs):
    out = []
    for v in range(M.A.nv):
        cat = np.concatenate([_cols(b[v], M.dims[v]) for b in bs], axis=1)
        out.append(la.colspace(cat, M.p) if cat.shape[1] else la.zeros(M.dims[v], 0))
    return out


def map_spaces(f: ModuleMap):
    """Return (kernel, inclusion), (image, factorization maps), (cokernel, projection).

    The image entry is a tuple (I, f_onto: dom -> I, incl: I -> cod).
    """
    p = f.p
    M, N = f.dom, f.cod
    kb = [la.nullspace(F, p) if F.shape[1] else la.zeros(0, 0) for F in f.mats]
    kb = [b if b.shape[0] == M.dims[v] else la.zeros(M.dims[v], 0) for v, b in enumerate(kb)]
    K, kin = submodule(M, kb)
    ib = [la.colspace(F, p) if F.size else la.zeros(N.dims[v], 0) for v, F in enumerate(f.mats)]
    I, iin = submodule(N, ib)
    onto = ModuleMap(M, I, [la.solve(B, F, p) if B.shape[1] else la.zeros(0, F.shape[1])
                            for B, F in zip(ib, f.mats)])
    C, cproj = quotient(N, ib)
    return (K, kin), (I, onto, iin), (C, cproj)


def kernel(f: ModuleMap):
    return map_spaces(f)[0]


def cokernel(f: ModuleMap):
    return map_spaces(f)[2]


# ---------------------------------------------------------------------------
# radical, top, socle

def rad_bases(M: ModuleRep, bases=None):
    """Per-vertex bases of J*N for the submodule N (default N = M)."""
    A = M.A
    p = M.p
    if bases is None:
        bases = [la.eye(d) for d in M.dims]
    cols = [[] for _ in range(A.nv)]
    for k in range(len(A.arrows)):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        if bases[s].shape[1] and M.dims[t]:
            cols[t].append(la.matmul(M.mats[k], bases[s], p))
    return [la.colspace(np.concatenate(c, axis=1), p) if c else la.zeros(M.dims[t], 0)
            for t, c in enumerate(cols)]


def socle_bases(M: ModuleRep, below=None):
    """Per-vertex bases of {m : J m in below} (below = 0 gives the socle)."""
    A = M.A
    p = M.p
    out = []
    for v in range(A.nv):
        rows = []
        for k in range(len(A.arrows)):
            if A.arrow_src[k] != v:
                continue
            t = A.arrow_tgt[k]
            Mk = M.mats[k]
            if below is not None:
                Q, _ = la.projector_mod(below[t], M.dims[t], p)
                Mk = la.matmul(Q, Mk, p)
            if Mk.shape[0]:
                rows.append(Mk)
        if not rows:
            out.append(la.eye(M.dims[v]))
        else:
            out.append(la.nullspace(np.concatenate(rows, axis=0), p) if M.dims[v] else la.zeros(0, 0))
    return out


def radical_series(M: ModuleRep):
    dims = [M.dim]
    cur = [la.eye(d) for d in M.dims]
    while sum(b.shape[1] for b in cur) > 0:
        cur = rad_bases(M, cur)
        d = sum(b.shape[1] for b in cur)
        if d >= dims[-1]:
            raise InvariantViolation("radical series does not decrease")
        dims.append(d)
    if dims[-1] != 0:
        dims.append(0)
    return tuple(dims)


def socle_series(M: ModuleRep):
    dims = [0]
    cur = [la.zeros(d, 0) for d in M.dims]
    while dims[-1] < M.dim:
        cur = socle_bases(M, cur)
        d = sum(b.shape[1] for b in cur)
        if d <= dims[-1]:
            raise InvariantViolation("socle series does not increase")
        dims.append(d)
    return tuple(dims)


def loewy_length_module(M: ModuleRep) -> int:
    return len(radical_series(M)) - 1


@dataclass
class Layers:
    top: ModuleRep
    top_proj: ModuleMap
    rad: ModuleRep
    rad_incl: ModuleMap
    soc: ModuleRep
    soc_incl: ModuleMap
    series: tuple


def layers(M: ModuleRep) -> Layers:
    rb = rad_bases(M)
    R, rin = submodule(M, rb)
    T, tproj = quotient(M, rb)
    sb = socle_bases(M)
    S, sin = submodule(M, sb)
    return Layers(T, tproj, R, rin, S, sin, radical_series(M))


def top_generators(M: ModuleRep):
    """(vertex, vector) pairs whose images form a basis of top(M)."""
    rb = rad_bases(M)
    gens = []
    for v in range(M.A.nv):
        if M.dims[v] == 0:
            continue
        I = la.eye(M.dims[v])
        for j in la.extend_basis(rb[v], I, M.p):
            gens.append((v, I[:, j].copy()))
    return gens


def top_vertices(M: ModuleRep):
    return [v for v, _ in top_generators(M)]


# ---------------------------------------------------------------------------
# maps out of projectives

def map_from_projective(M: ModuleRep, gens, P: ModuleRep | None = None) -> ModuleMap:
    """The map P(v_1)+...+P(v_m) -> M sending the i-th generator e_{v_i} to m_i."""
    A = M.A
    p = M.p
    verts = [v for v, _ in gens]
    P = P or proj_sum(A, verts)
    # generators grouped by vertex, so each basis element acts once
    by_vert = {}
    for i, (v, m) in enumerate(gens):
        by_vert.setdefault(v, []).append(i)
    G = {v: np.stack([np.asarray(gens[i][1], dtype=np.int64).reshape(-1) for i in idx], axis=1)
         for v, idx in by_vert.items()}
    pos = {v: {i: j for j, i in enumerate(idx)} for v, idx in by_vert.items()}
    mats = []
    for w in range(A.nv):
        img = {v: [la.matmul(M.act(b), G[v], p) for b in A.block(w, v)] for v in by_vert}
        cols = []
        for i, (v, _) in enumerate(gens):
            j = pos[v][i]
            cols.extend(X[:, j:j + 1] for X in img[v])
        mats.append(np.concatenate(cols, axis=1) if cols else la.zeros(M.dims[w], 0))
    return ModuleMap(P, M, mats)


def proj_element_split(A: BasedAlgebra, verts, w: int, x):
    """Split a vector of (P(v_1)+...+P(v_m))_w into algebra elements x_i in e_w A e_{v_i}."""
    out = []
    pos = 0
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    for v in verts:
        blk = A.block(w, v)
        y = np.zeros(A.dim, dtype=np.int64)
        for j, b in enumerate(blk):
            y[b] = x[pos + j]
        pos += len(blk)
        out.append(y)
    return out


def proj_element_join(A: BasedAlgebra, verts, w: int, elems):
    parts = []
    for v, y in zip(verts, elems):
        parts.append(np.asarray([y[b] for b in A.block(w, v)], dtype=np.int64))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


PRESENTATION_ENTRY_BUDGET = 10_000_000


class _Presentation:
    """Projective presentation data used by hom_basis."""

    def __init__(self, M: ModuleRep):
        A = M.A
        p = M.p
        self.gens = top_generators(M)
        self.verts = [v for v, _ in self.gens]
        C = A.cartan()
        pdims = [sum(int(C[w, v]) for v in self.verts) for w in range(A.nv)]
        entries = sum(pdims[A.arrow_tgt[k]] * pdims[A.arrow_src[k]] for k in range(len(A.arrows)))
        if entries > PRESENTATION_ENTRY_BUDGET:
            raise ResourceError(f"hom_basis: projective presentation of a module of dim {M.dim} "
                                f"needs {entries} matrix entries, over the budget")
        P0 = proj_sum(A, self.verts)
        pi = map_from_projective(M, self.gens, P0)
        self.P0 = P0
        self.pi = pi
        # right inverses of the (surjective) vertex components
        self.right_inv = []
        for w in range(A.nv):
            Pw = pi.mats[w]
            self.right_inv.append(la.solve(Pw, la.eye(M.dims[w]), p) if M.dims[w] else la.zeros(P0.dims[w], 0))
        kb = [la.nullspace(F, p) if F.shape[1] else la.zeros(0, 0) for F in pi.mats]
        kb = [b if b.shape[0] == P0.dims[v] else la.zeros(P0.dims[v], 0) for v, b in enumerate(kb)]
        rk = rad_bases(P0, kb)
        self.rels = []
        for u in range(A.nv):
            for j in la.extend_basis(rk[u], kb[u], p):
                self.rels.append((u, proj_element_split(A, self.verts, u, kb[u][:, j])))


def _presentation(M: ModuleRep) -> _Presentation:
    pr = M.__dict__.get("_pres")
    if pr is None:
        pr = _Presentation(M)
        M.__dict__["_pres"] = pr
    return pr


HOM_ENTRY_BUDGET = 40_000_000


def hom_basis(M: ModuleRep, N: ModuleRep):
    """Basis of Hom_A(M, N), via a projective presentation of M."""
    if M.A is not N.A:
        raise InvariantViolation("hom_basis: modules over different algebras")
    A = M.A
    p = M.p
    if M.dim == 0 or N.dim == 0:
        return []
    pr = _presentation(M)
    verts = pr.verts
    offs = [0]
    for v in verts:
        offs.append(offs[-1] + N.dims[v])
    nunk = offs[-1]
    if nunk == 0:
        return []
    neq = sum(N.dims[u] for u, _ in pr.rels)
    if neq * nunk > HOM_ENTRY_BUDGET:
        raise ResourceError(f"hom_basis: linear system of size {neq} x {nunk} exceeds the budget")
    eqs = []
    for u, elems in pr.rels:
        if N.dims[u] == 0:
            continue
        row = la.zeros(N.dims[u], nunk)
        for i, (v, x) in enumerate(zip(verts, elems)):
            if x.any():
                row[:, offs[i]:offs[i + 1]] = N.act_elem(x, u, v)
        eqs.append(row)
    sol = la.nullspace(np.concatenate(eqs, axis=0), p) if eqs else la.eye(nunk)
    e = sol.shape[1]
    if e * M.dim * N.dim > HOM_ENTRY_BUDGET:
        raise ResourceError(f"hom_basis: {e} maps of size {N.dim} x {M.dim} exceed the budget")
    if e == 0:
        return []
    per_w = []
    for w in range(A.nv):
        if M.dims[w] == 0 or N.dims[w] == 0:
            per_w.append(np.zeros((e, N.dims[w], M.dims[w]), dtype=np.int64))
            continue
        # images of the generators' basis paths, for all solutions at once
        imgs = [la.matmul(N.act(b), sol[offs[i]:offs[i + 1], :], p)
                for i, v in enumerate(verts) for b in A.block(w, v)]
        Phi = np.stack(imgs, axis=2)  # N_w x e x (P0)_w
        Phi = Phi.transpose(1, 0, 2).reshape(e * N.dims[w], -1)
        per_w.append(la.matmul(Phi, pr.right_inv[w], p).reshape(e, N.dims[w], M.dims[w]))
    return [ModuleMap(M, N, [per_w[w][j] for w in range(A.nv)]) for j in range(e)]


def hom_basis_bruteforce(M: ModuleRep, N: ModuleRep):
    """Direct solve of the intertwiner equations f_t M_a = N_a f_s (test oracle)."""
    A = M.A
    p = M.p
    sizes = [N.dims[v] * M.dims[v] for v in range(A.nv)]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    n = int(offs[-1])
    if n == 0:
        return []
    rows = []
    for k in range(len(A.arrows)):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        # vec(f_t M_a) - vec(N_a f_s) with row-major vec: vec(X B) = (I kron B^T) vec X
        Ma, Na = M.mats[k], N.mats[k]
        blk = la.zeros(N.dims[t] * M.dims[s], n)
        if sizes[t]:
            blk[:, offs[t]:offs[t + 1]] = np.kron(la.eye(N.dims[t]), Ma.T) % p
        if sizes[s]:
            blk[:, offs[s]:offs[s + 1]] = (blk[:, offs[s]:offs[s + 1]] - np.kron(Na, la.eye(M.dims[s]))) % p
        rows.append(blk)
    sol = la.nullspace(np.concatenate(rows, axis=0), p) if rows else la.eye(n)
    out = []
    for j in range(sol.shape[1]):
        mats = [sol[offs[v]:offs[v + 1], j].reshape(N.dims[v], M.dims[v]) for v in range(A.nv)]
        out.append(ModuleMap(M, N, mats))
    return out


def end_total(M: ModuleRep):
    """Basis of End(M) as total-space matrices."""
    return [f.total() for f in hom_basis(M, M)]


def from_total(M: ModuleRep, N: ModuleRep, T) -> ModuleMap:
    oc, od = N.offsets, M.offsets
    return ModuleMap(M, N, [T[oc[v]:oc[v + 1], od[v]:od[v + 1]] for v in range(M.A.nv)])


# ---------------------------------------------------------------------------
# Krull-Schmidt

def fingerprint(M: ModuleRep):
    """(dim vector, dim End, radical series dims, socle series dims)."""
    fp = M.__dict__.get("_fp")
    if fp is None:
        fp = (M.dims, len(hom_basis(M, M)), radical_series(M), socle_series(M))
        M.__dict__["_fp"] = fp
    return fp


def _minpoly(X, p, maxdeg):
    """Monic minimal polynomial of the square matrix X, coefficients low to high."""
    n = X.shape[0]
    powers = [la.eye(n).reshape(-1)]
    cur = la.eye(n)
    for d in range(1, maxdeg + 2):
        cur = la.matmul(cur, X, p)
        V = np.stack(powers, axis=1)
        try:
            c = la.solve(V, cur.reshape(-1, 1), p).reshape(-1)
        except ValueError:
            powers.append(cur.reshape(-1))
            continue
        return [int((-x) % p) for x in c] + [1]
    raise InvariantViolation("minimal polynomial degree exceeds the bound")


def _factor(coeffs, p):
    """Distinct irreducible factors with multiplicities, via sympy."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
    _, facs = poly.factor_list()
    out = []
    for f, e in facs:
        cs = [int(c) % p for c in reversed(f.all_coeffs())]
        out.append((cs, int(e)))
    return out


def _polyval(coeffs, X, p):
    n = X.shape[0]
    out = la.zeros(n, n)
    for c in reversed(coeffs):
        out = (la.matmul(out, X, p) + c * la.eye(n)) % p
    return out


def _polypow(coeffs, e, p):
    out = [1]
    for _ in range(e):
        new = [0] * (len(out) + len(coeffs) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(coeffs):
                new[i + j] = (new[i + j] + a * b) % p
        out = new
    return out


def _end_radical(E, p):
    """Coefficient basis (columns) of the Jacobson radical of span(E).

    Uses the trace form in the given faithful representation when p exceeds
    its dimension, otherwise the regular representation.
    """
    e = len(E)
    d = E[0].shape[0]
    if p > d:
        F = np.stack([X.reshape(-1) for X in E])
        Ft = np.stack([X.T.reshape(-1) for X in E])
        G = la.matmul(F, Ft.T, p)
        return la.nullspace(G, p)
    if p > e:
        flat = np.stack([X.reshape(-1) for X in E], axis=1)
        reg = []
        for X in E:
            prods = np.stack([la.matmul(X, Y, p).reshape(-1) for Y in E], axis=1)
            reg.append(la.solve(flat, prods, p))
        F = np.stack([R.reshape(-1) for R in reg])
        Ft = np.stack([R.T.reshape(-1) for R in reg])
        return la.nullspace(la.matmul(F, Ft.T, p), p)
    raise ResourceError(f"endomorphism radical needs p > min(dim M, dim End) (p={p}, dims {d}, {e})")


class _Splitter:
    def __init__(self, rng, trials=64):
        self.rng = rng
        self.trials = trials

    def split(self, M: ModuleRep, incl_total: np.ndarray):
        """Return list of (indecomposable module, total inclusion matrix into the root)."""
        if M.dim == 0:
            return []
        p = M.p
        E = end_total(M)
        if len(E) == 1:
            return [(M, incl_total)]
        J = _end_radical(E, p)
        q = len(E) - J.shape[1]
        if q == 1:
            return [(M, incl_total)]
        stack = np.stack(E)
        for _ in range(self.trials):
            c = self.rng.integers(0, p, size=len(E))
            X = np.tensordot(c, stack, axes=1) % p
            mp = _minpoly(X, p, len(E))
            facs = _factor(mp, p)
            if len(facs) >= 2:
                f, m = facs[0]
                Y = _polyval(_polypow(f, m, p), X, p)
                Yv = from_total(M, M, Y)
                (K, kin), (I, _, iin), _ = map_spaces(Yv)
                if K.dim == 0 or I.dim == 0:
                    continue
                out = []
                out += self.split(K, la.matmul(incl_total, kin.total(), p))
                out += self.split(I, la.matmul(incl_total, iin.total(), p))
                return out
            if self._field_quotient(E, J, X, p, q):
                return [(M, incl_total)]
        raise ResourceError(f"idempotent search exhausted {self.trials} trials on a module of dim {M.dim}")

    @staticmethod
    def _field_quotient(E, J, X, p, q):
        """True when the image of X generates End/rad as a field of degree q."""
        flat = np.stack([Y.reshape(-1) for Y in E], axis=1)
        xc = la.solve(flat, X.reshape(-1, 1), p).reshape(-1)
        # left multiplication by X on End, then on End/J
        L = np.stack([la.solve(flat, la.matmul(X, Y, p).reshape(-1, 1), p).reshape(-1) for Y in E], axis=1)
        Q, R = la.projector_mod(J, len(E), p)
        Lq = la.mmul(p, Q, L, R)
        mp = _minpoly(Lq, p, q)
        if len(mp) - 1 != q:
            return False
        facs = _factor(mp, p)
        return len(facs) == 1 and facs[0][1] == 1


@dataclass
class Decomposition:
    module: ModuleRep
    classes: list  # list of (ModuleRep, multiplicity)
    summands: list  # list of (class index, ModuleMap inclusion into module)
    witness: ModuleMap  # direct sum of summands -> module, an isomorphism

    @property
    def pieces(self):
        return self.classes

    def multiset(self):
        return sorted((fingerprint(X), m) for X, m in self.classes)

    def is_indecomposable(self):
        return len(self.summands) == 1


def iso_indecomposable(X: ModuleRep, Y: ModuleRep):
    """Isomorphism X -> Y for indecomposable X, Y, or None."""
    if X.dims != Y.dims:
        return None
    if X.dim == 0:
        return zero_map(X, Y)
    F = hom_basis(X, Y)
    if not F:
        return None
    G = hom_basis(Y, X)
    for f in F:
        for g in G:
            if compose(g, f).is_iso():
                return f
    return None


def split_simple_summands(M: ModuleRep):
    """M = M' + (simple summands), found without the endomorphism ring.

    A socle vector outside rad M spans a simple summand: reading its
    coordinate in a basis extending rad M is a retraction, since every
    arrow lands in rad M. Returns ([(v, vector)], M', inclusion of M').
    """
    A = M.A
    p = M.p
    R = rad_bases(M)
    So = socle_bases(M)
    simples = []
    keep = []
    for v in range(A.nv):
        Rv = _cols(R[v], M.dims[v])
        Sv = _cols(So[v], M.dims[v])
        C = Sv[:, la.extend_basis(Rv, Sv, p)] if Sv.shape[1] else Sv
        simples.extend((v, C[:, j].copy()) for j in range(C.shape[1]))
        if C.shape[1] == 0:
            keep.append(la.eye(M.dims[v]))
            continue
        RC = np.concatenate([Rv, C], axis=1)
        W = la.eye(M.dims[v])[:, la.extend_basis(RC, la.eye(M.dims[v]), p)]
        keep.append(np.concatenate([Rv, W], axis=1))
    if not simples:
        return [], M, identity(M)
    Mp, incl = submodule(M, keep)
    return simples, Mp, incl


def _simple_summand_counts(M: ModuleRep):
    """Multiplicity of each S(v) as a direct summand: dim soc_v - dim (soc ∩ rad)_v."""
    R = rad_bases(M)
    So = socle_bases(M)
    out = []
    for v in range(M.A.nv):
        Rv, Sv = _cols(R[v], M.dims[v]), _cols(So[v], M.dims[v])
        out.append(len(la.extend_basis(Rv, Sv, M.p)) if Sv.shape[1] else 0)
    return tuple(out)


def decompose(M: ModuleRep, seed: int = 0, trials: int = 64) -> Decomposition:
    rng = np.random.default_rng(seed)
    p = M.p
    A = M.A
    if M.dim == 0:
        return Decomposition(M, [], [], zero_map(zero_module(A), M))
    simples, Mp, incl = split_simple_summands(M)
    raw = []
    off = M.offsets
    for v, x in simples:
        X = standard_module(A, "simple", v)
        T = la.zeros(M.dim, 1)
        T[off[v]:off[v + 1], 0] = x
        raw.append((X, T))
    raw += _Splitter(rng, trials).split(Mp, incl.total())
    pieces = []
    for X, T in raw:
        pieces.append((X, from_total(X, M, T)))
    # group into isomorphism classes
    classes = []  # [rep, [summand indices]]
    for i, (X, _) in enumerate(pieces):
        fp = fingerprint(X)
        for cl in classes:
            if fingerprint(cl[0]) == fp and iso_indecomposable(cl[0], X) is not None:
                cl[1].append(i)
                break
        else:
            classes.append([X, [i]])
    order = sorted(range(len(classes)), key=lambda c: (fingerprint(classes[c][0]), c))
    cls_out = []
    summands = []
    for new, c in enumerate(order):
        rep, members = classes[c]
        cls_out.append((rep, len(members)))
        for i in members:
            summands.append((new, pieces[i][1]))
    S, inj, proj = direct_sum([f.dom for _, f in summands])
    W = zero_map(S, M)
    for (_, f), pr in zip(summands, proj):
        W = W + compose(f, pr)
    if not W.is_iso():
        raise InvariantViolation("decomposition witness is not an isomorphism")
    return Decomposition(M, cls_out, summands, W)


def is_isomorphic(M: ModuleRep, N: ModuleRep, seed: int = 0):
    """(True, isomorphism M -> N) or (False, None)."""
    if M.A is not N.A:
        raise InvariantViolation("is_isomorphic: modules over different algebras")
    if M.dims != N.dims:
        return False, None
    if M.dim == 0:
        return True, zero_map(M, N)
    # cheap invariants before any endomorphism ring
    if radical_series(M) != radical_series(N) or socle_series(M) != socle_series(N):
        return False, None
    if _simple_summand_counts(M) != _simple_summand_counts(N):
        return False, None
    dM = decompose(M, seed)
    dN = decompose(N, seed)
    if len(dM.summands) != len(dN.summands):
        return False, None
    used = [False] * len(dN.summands)
    pairs = []
    for i, (_, f) in enumerate(dM.summands):
        X = f.dom
        for j, (_, g) in enumerate(dN.summands):
            if used[j] or fingerprint(g.dom) != fingerprint(X):
                continue
            phi = iso_indecomposable(X, g.dom)
            if phi is not None:
                used[j] = True
                pairs.append((i, j, phi))
                break
        else:
            return False, None
    # M -> (+X_i) -> (+Y_j) -> N
    Winv = dM.witness.inverse()
    _, _, projM = direct_sum([f.dom for _, f in dM.summands])
    F = zero_map(M, N)
    for i, j, phi in pairs:
        g = dN.summands[j][1]
        F = F + compose(g, compose(phi, compose(projM[i], Winv)))
    if not F.is_iso():
        raise InvariantViolation("is_isomorphic: assembled witness is not invertible")
    return True, F


def is_projective(M: ModuleRep) -> bool:
    """M is projective iff dim M equals the dimension of its projective cover."""
    A = M.A
    return M.dim == sum(sum(len(b) for b in A.by_source[v]) for v in top_vertices(M))


# ---------------------------------------------------------------------------
# text format

def module_text(M: ModuleRep, algebra_id: str | None = None) -> str:
    A = M.A
    lines = [f"module over {algebra_id or A.name}"]
    for v, d in enumerate(M.dims):
        lines.append(f"dim {A.vertices[v]} = {d}")
    for k, lab in enumerate(A.arrow_labels):
        lines.append(f"matrix {lab} = {json.dumps(M.mats[k].tolist())}")
    return "\n".join(lines) + "\n"


def parse_module(text: str, A: BasedAlgebra, source: str | None = None) -> ModuleRep:
    dims = {}
    mats = {}
    header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("module"):
            m = re.fullmatch(r"module\s+over\s+(\S+)", line)
            if not m:
                raise ParseError("expected 'module over <algebra-id>'", lineno, 1, source)
            header = True
            continue
        m = re.fullmatch(r"dim\s+(\S+)\s*=\s*(\d+)", line)
        if m:
            if m.group(1) not in A.vertices:
                raise ParseError(f"unknown vertex {m.group(1)!r}", lineno, 5, source)
            dims[m.group(1)] = int(m.group(2))
            continue
        m = re.fullmatch(r"matrix\s+(\S+)\s*=\s*(.+)", line)
        if m:
            if m.group(1) not in A.arrow_labels:
                raise ParseError(f"unknown arrow {m.group(1)!r}", lineno, 8, source)
            try:
                mats[m.group(1)] = json.loads(m.group(2))
            except json.JSONDecodeError as e:
                raise ParseError(f"bad matrix literal: {e.msg}", lineno, m.start(2) + 1 + e.pos, source) from None
            continue
        raise ParseError("unrecognized line", lineno, 1, source)
    if not header:
        raise ParseError("missing 'module over' header", None, None, source)
    dv = [dims.get(v, 0) for v in A.vertices]
    out = []
    for k, lab in enumerate(A.arrow_labels):
        r, c = dv[A.arrow_tgt[k]], dv[A.arrow_src[k]]
        M = np.asarray(mats.get(lab, np.zeros((r, c))), dtype=np.int64)
        if M.size == 0:
            M = M.reshape(r, c)
        if M.shape != (r, c):
            raise ParseError(f"matrix {lab} has shape {M.shape}, expected {(r, c)}", None, None, source)
        out.append(M)
    return ModuleRep(A, dv, out, check=True)
