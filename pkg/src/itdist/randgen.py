"""Seeded random modules, maps and complexes for property tests and harnesses."""

from __future__ import annotations

import numpy as np

from . import linalg as la
from . import modrep as mr
from .algebra import BasedAlgebra
from .dercat import ChainMap, ModuleComplex, ProjComplex, _empty, cone, direct_sum_complex, identity_chain_map
from .homology import algebra_mat_mul
from .modrep import ModuleMap, ModuleRep


def rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_module(A: BasedAlgebra, rng, max_tops: int = 2, max_relations: int = 2,
                  max_dim: int | None = None) -> ModuleRep:
    """A quotient of a small sum of projectives by a random submodule of its radical.

    Such a quotient has the chosen projective sum as its projective cover.
    """
    for _ in range(50):
        k = int(rng.integers(1, max_tops + 1))
        verts = [int(v) for v in rng.integers(0, A.nv, size=k)]
        P = mr.proj_sum(A, verts)
        R = mr.rad_bases(P)
        gens = []
        for _ in range(int(rng.integers(0, max_relations + 1))):
            cand = [v for v in range(A.nv) if R[v].shape[1]]
            if not cand:
                break
            v = cand[int(rng.integers(0, len(cand)))]
            c = rng.integers(0, A.p, size=R[v].shape[1])
            gens.append((v, la.matmul(R[v], c.reshape(-1, 1), A.p).reshape(-1)))
        sub = mr.generated_bases(P, gens) if gens else [la.zeros(d, 0) for d in P.dims]
        M, _ = mr.quotient(P, sub)
        if max_dim is None or M.dim <= max_dim:
            return M
    return mr.standard_module(A, "simple", int(rng.integers(0, A.nv)))


def random_map(M: ModuleRep, N: ModuleRep, rng) -> ModuleMap:
    H = mr.hom_basis(M, N)
    f = mr.zero_map(M, N)
    for g in H:
        f = f + g.scale(int(rng.integers(0, M.p)))
    return f


def random_conjugate(M: ModuleRep, rng) -> ModuleRep:
    gs = [la.random_invertible(rng, d, M.p) if d else la.zeros(0, 0) for d in M.dims]
    return M.conjugate(gs)


def random_vertex_subset(A: BasedAlgebra, rng) -> tuple:
    return tuple(v for v in range(A.nv) if rng.integers(0, 2))


# ---------------------------------------------------------------------------
# complexes

def _radical_unknowns(A, rows, cols):
    rad = set(A.radical_indices)
    return [(j, k, b) for j, u in enumerate(rows) for k, w in enumerate(cols)
            for b in A.block(u, w) if b in rad]


def _next_differential(A, D_prev, rows, cols, rng):
    """A random radical D with D_prev * D = 0 (row convention)."""
    unk = _radical_unknowns(A, rows, cols)
    if not unk:
        return _empty(len(rows), len(cols), A.dim)
    if D_prev is None or D_prev.shape[0] == 0:
        D = _empty(len(rows), len(cols), A.dim)
        for j, k, b in unk:
            D[j, k, b] = int(rng.integers(0, A.p))
        return D
    eqs = []
    for j, k, b in unk:
        E = _empty(len(rows), len(cols), A.dim)
        E[j, k, b] = 1
        eqs.append(algebra_mat_mul(A, D_prev, E).reshape(-1))
    M = np.stack(eqs, axis=1)
    N = la.nullspace(M, A.p)
    D = _empty(len(rows), len(cols), A.dim)
    if N.shape[1] == 0:
        return D
    c = rng.integers(0, A.p, size=N.shape[1])
    vec = la.matmul(N, c.reshape(-1, 1), A.p).reshape(-1)
    for (j, k, b), x in zip(unk, vec):
        D[j, k, b] = int(x)
    return D


def random_radical_complex(A: BasedAlgebra, rng, lo: int = -1, hi: int = 1, max_terms: int = 2) -> ProjComplex:
    """A bounded radical complex of projectives on [lo, hi]."""
    terms = {i: [int(v) for v in rng.integers(0, A.nv, size=int(rng.integers(1, max_terms + 1)))]
             for i in range(lo, hi + 1)}
    diffs = {}
    prev = None
    for i in range(lo, hi):
        D = _next_differential(A, prev, terms[i], terms[i + 1], rng)
        diffs[i] = D
        prev = D
    return ProjComplex(A, terms, diffs, True, check=True, require_radical=True)


def _unit_matrix(A, verts, rng, radical_part=True):
    n = len(verts)
    F = _empty(n, n, A.dim)
    for v in set(verts):
        idx = [j for j, u in enumerate(verts) if u == v]
        G = la.random_invertible(rng, len(idx), A.p)
        for a, j in enumerate(idx):
            for b, k in enumerate(idx):
                F[j, k, A.idem[v]] = G[a, b]
    if radical_part:
        for j, k, b in _radical_unknowns(A, verts, verts):
            if rng.integers(0, 2):
                F[j, k, b] = (F[j, k, b] + int(rng.integers(0, A.p))) % A.p
    return F


def _inverse_unit_matrix(A, F, verts):
    """Inverse of S + N in the matrix ring over A, where S has idempotent entries and N is radical."""
    n = len(verts)
    p = A.p
    e = [A.idem[v] for v in verts]
    C = np.array([[F[j, k, e[j]] if verts[j] == verts[k] else 0 for k in range(n)] for j in range(n)],
                 dtype=np.int64)
    Ci = la.inverse(C % p, p)
    S, Sinv, I = (_empty(n, n, A.dim) for _ in range(3))
    for j in range(n):
        I[j, j, e[j]] = 1
        for k in range(n):
            if verts[j] == verts[k]:
                S[j, k, e[j]] = C[j, k]
                Sinv[j, k, e[j]] = Ci[j, k]
    # F = S (1 + X) with X = S^{-1} N nilpotent, so F^{-1} = (1 - X + X^2 - ...) S^{-1}
    X = algebra_mat_mul(A, Sinv, (F - S) % p)
    inv, term = I.copy(), I.copy()
    while True:
        term = (-algebra_mat_mul(A, term, X)) % p
        if not term.any():
            break
        inv = (inv + term) % p
    return algebra_mat_mul(A, inv, Sinv)


def random_chain_automorphism(X: ProjComplex, rng):
    """(X', F): d' = F d F^{-1} degreewise, and F: X' -> X is a chain isomorphism."""
    A = X.A
    Fs, Finv = {}, {}
    for i, t in X.terms.items():
        if t:
            Fs[i] = _unit_matrix(A, t, rng)
            Finv[i] = _inverse_unit_matrix(A, Fs[i], t)
    diffs = {}
    for i in range(X.lo, X.hi):
        D = X.D(i)
        if D.size == 0 or i not in Fs or i + 1 not in Fs:
            diffs[i] = D
            continue
        # row convention: composite a then b is algebra_mat_mul(a, b)
        diffs[i] = algebra_mat_mul(A, algebra_mat_mul(A, Fs[i], D), Finv[i + 1])
    Y = ProjComplex(A, X.terms, diffs, X.exact_lo, check=True)
    return Y, ChainMap(Y, X, Fs)


def random_nonminimal_complex(A: BasedAlgebra, rng, lo: int = -1, hi: int = 1, max_terms: int = 2):
    """A random radical complex plus contractible pieces, scrambled by a chain automorphism.

    Returns (scrambled complex, the radical core).
    """
    core = random_radical_complex(A, rng, lo, hi, max_terms)
    X = core
    for _ in range(int(rng.integers(1, 3))):
        v = int(rng.integers(0, A.nv))
        i = int(rng.integers(lo, hi + 1))
        stalk = ProjComplex(A, {i: [v]}, {}, True, check=False)
        X = direct_sum_complex(X, cone(identity_chain_map(stalk)))
    Y, _ = random_chain_automorphism(X, rng)
    return Y, core


def random_module_complex(A: BasedAlgebra, rng, lo: int = -1, max_dim: int = 8) -> ModuleComplex:
    """A two-term complex M -> N of small modules in degrees lo, lo+1."""
    M = random_module(A, rng, max_tops=1, max_dim=max_dim)
    N = random_module(A, rng, max_tops=1, max_dim=max_dim)
    f = random_map(M, N, rng)
    return ModuleComplex(A, {lo: M, lo + 1: N}, {lo: f})
