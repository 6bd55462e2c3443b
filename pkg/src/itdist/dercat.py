"""Complexes of projectives, resolutions of bounded complexes, syzygy complexes.

Complexes are cohomological: d^i goes from degree i to degree i+1, and
X[k]^i = X^{i+k}.  Shifting does not change the sign of the differential
(the result is isomorphic to the sign-twisted one).

A :class:`ProjComplex` stores, per degree, the generator vertices of a sum
of indecomposable projectives and, per differential, an algebra-element
array in the row convention of :mod:`itdist.homology`.  ``exact_lo`` says
whether the complex really vanishes below its lowest stored degree or is
only a window onto a longer (bounded above) complex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from . import modrep as mr
from .algebra import BasedAlgebra
from .constructions import dual, dual_map_between
from .errors import InvariantViolation, ResourceError
from .homology import algebra_mat_mul
from .modrep import ModuleMap, ModuleRep


# ---------------------------------------------------------------------------
# complexes of modules

class ModuleComplex:
    """Bounded complex of modules X^lo -> ... -> X^hi."""

    def __init__(self, A: BasedAlgebra, mods: dict, maps: dict, check: bool = True):
        self.A = A
        self.mods = {int(i): M for i, M in mods.items()}
        self.maps = {int(i): f for i, f in maps.items()}
        if check:
            self.validate()

    @property
    def degrees(self):
        nz = [i for i, M in self.mods.items() if M.dim]
        return (min(nz), max(nz)) if nz else (0, -1)

    @property
    def lo(self):
        return self.degrees[0]

    @property
    def hi(self):
        return self.degrees[1]

    def mod(self, i) -> ModuleRep:
        M = self.mods.get(i)
        return M if M is not None else mr.zero_module(self.A)

    def d(self, i) -> ModuleMap:
        f = self.maps.get(i)
        if f is not None:
            return f
        return mr.zero_map(self.mod(i), self.mod(i + 1))

    def validate(self):
        lo, hi = self.degrees
        for i in range(lo - 1, hi + 1):
            f = self.d(i)
            g = self.d(i + 1)
            if f.dom.dims != self.mod(i).dims or f.cod.dims != self.mod(i + 1).dims:
                raise InvariantViolation(f"module complex: differential {i} has the wrong shape")
            f.validate()
            if not mr.compose(g, f).is_zero():
                raise InvariantViolation(f"module complex: d^{i + 1} d^{i} != 0")
        return True

    def cohomology_dims(self):
        lo, hi = self.degrees
        out = {}
        p = self.A.p
        for i in range(lo, hi + 1):
            Xi = self.mod(i)
            ker = Xi.dim - self.d(i).rank()
            im = self.d(i - 1).rank()
            out[i] = ker - im
        return out

    def shift(self, k: int) -> "ModuleComplex":
        return ModuleComplex(self.A, {i - k: M for i, M in self.mods.items()},
                             {i - k: f for i, f in self.maps.items()}, check=False)


def stalk(M: ModuleRep, degree: int = 0) -> ModuleComplex:
    return ModuleComplex(M.A, {degree: M}, {}, check=False)


def module_complex_sum(X: ModuleComplex, Y: ModuleComplex) -> ModuleComplex:
    A = X.A
    lo = min(X.lo, Y.lo)
    hi = max(X.hi, Y.hi)
    mods, maps, data = {}, {}, {}
    for i in range(lo, hi + 1):
        data[i] = mr.direct_sum([X.mod(i), Y.mod(i)])
        mods[i] = data[i][0]
    for i in range(lo, hi):
        maps[i] = mr.direct_sum_maps([X.d(i), Y.d(i)], mods[i], mods[i + 1])
    return ModuleComplex(A, mods, maps, check=False)


def dual_module_complex(X: ModuleComplex) -> ModuleComplex:
    """D(X): degree i holds D(X^{-i}); d^i = D(d^{-i-1})."""
    lo, hi = X.degrees
    mods = {-i: dual(X.mod(i)) for i in range(lo, hi + 1)}
    maps = {}
    for i in range(lo, hi):
        f = X.d(i)  # X^i -> X^{i+1}
        maps[-i - 1] = dual_map_between(f, mods[-i - 1], mods[-i])
    Aop = X.A.opposite()
    return ModuleComplex(Aop, mods, maps, check=False)


# ---------------------------------------------------------------------------
# complexes of projectives

def _empty(n, m, dim):
    return np.zeros((n, m, dim), dtype=np.int64)


class ProjComplex:
    def __init__(self, A: BasedAlgebra, terms: dict, diffs: dict, exact_lo: bool = True,
                 check: bool = True, require_radical: bool = False):
        self.A = A
        terms = {int(i): list(int(v) for v in t) for i, t in terms.items()}
        nz = [i for i, t in terms.items() if t]
        self.exact_lo = bool(exact_lo)
        if nz:
            lo0 = min(terms) if not exact_lo else min(nz)
            hi0 = max(nz)
        else:
            lo0, hi0 = (min(terms) if terms and not exact_lo else 0), -1
        self._lo, self._hi = lo0, hi0
        self.terms = {i: terms.get(i, []) for i in range(lo0, hi0 + 1)}
        self.diffs = {}
        for i in range(lo0, hi0):
            D = diffs.get(i)
            a, b = len(self.terms[i]), len(self.terms[i + 1])
            if D is None or np.asarray(D).size == 0:
                D = _empty(a, b, A.dim)
            self.diffs[i] = np.asarray(D, dtype=np.int64).reshape(a, b, A.dim) % A.p
        if check:
            self.validate(require_radical)

    @property
    def lo(self):
        return self._lo

    @property
    def hi(self):
        return self._hi

    def term(self, i):
        return self.terms.get(i, [])

    def D(self, i):
        D = self.diffs.get(i)
        if D is None:
            return _empty(len(self.term(i)), len(self.term(i + 1)), self.A.dim)
        return D

    def is_zero(self):
        return all(not t for t in self.terms.values())

    def multisets(self):
        return {i: tuple(sorted(t)) for i, t in self.terms.items() if t}

    def betti(self):
        out = {}
        for i, t in self.terms.items():
            row = [0] * self.A.nv
            for v in t:
                row[v] += 1
            out[i] = row
        return out

    def validate(self, require_radical: bool = False):
        A = self.A
        for i in range(self.lo, self.hi):
            D = self.D(i)
            for j, u in enumerate(self.term(i)):
                for k, v in enumerate(self.term(i + 1)):
                    x = D[j, k]
                    if x.any():
                        bad = np.flatnonzero(x)
                        if np.any(A.tgt[bad] != u) or np.any(A.src[bad] != v):
                            raise InvariantViolation(f"complex: entry ({j},{k}) of d^{i} leaves e_u A e_v")
            if i + 1 < self.hi:
                if algebra_mat_mul(A, D, self.D(i + 1)).any():
                    raise InvariantViolation(f"complex: d^{i + 1} d^{i} != 0")
        if require_radical and not self.is_radical():
            raise InvariantViolation("complex: differential is not radical")
        return True

    def is_radical(self):
        idem = list(self.A.idem)
        return all(not D[..., idem].any() for D in self.diffs.values() if D.size)

    # -- conversions -------------------------------------------------------
    def module(self, i) -> ModuleRep:
        return mr.proj_sum(self.A, self.term(i))

    def d_map(self, i) -> ModuleMap:
        """d^i as a ModuleMap between the sums of projectives."""
        A = self.A
        src = self.module(i)
        tgt = self.module(i + 1)
        gens = [(u, mr.proj_element_join(A, self.term(i + 1), u, self.D(i)[j]))
                for j, u in enumerate(self.term(i))]
        return mr.map_from_projective(tgt, gens, src)

    def to_module_complex(self) -> ModuleComplex:
        mods = {i: self.module(i) for i in range(self.lo, self.hi + 1)}
        maps = {}
        for i in range(self.lo, self.hi):
            f = self.d_map(i)
            maps[i] = ModuleMap(mods[i], mods[i + 1], f.mats)
        return ModuleComplex(self.A, mods, maps, check=False)

    def cohomology_dims(self):
        """Cohomology dims on the degrees where they are determined."""
        out = {}
        start = self.lo if self.exact_lo else self.lo + 1
        for i in range(start, self.hi + 1):
            dim = sum(len(self.A.by_source[v][w]) for v in self.term(i) for w in range(self.A.nv))
            ker = dim - (self.d_map(i).rank() if i < self.hi else 0)
            im = self.d_map(i - 1).rank() if i - 1 >= self.lo else 0
            out[i] = ker - im
        return {i: h for i, h in out.items()}

    def top_cohomology_module(self) -> ModuleRep:
        """H^hi as a module (coker of the last differential)."""
        if self.hi < self.lo:
            return mr.zero_module(self.A)
        if self.hi - 1 >= self.lo:
            return mr.cokernel(self.d_map(self.hi - 1))[0]
        return self.module(self.hi)

    # -- operations ----------------------------------------------------------
    def shift(self, k: int) -> "ProjComplex":
        return ProjComplex(self.A, {i - k: t for i, t in self.terms.items()},
                           {i - k: D for i, D in self.diffs.items()}, self.exact_lo, check=False)

    def truncate_le(self, n: int) -> "ProjComplex":
        """Brutal truncation X_{<= n}."""
        terms = {i: t for i, t in self.terms.items() if i <= n}
        if not terms:
            return ProjComplex(self.A, {n: []}, {}, True, check=False)
        diffs = {i: D for i, D in self.diffs.items() if i + 1 <= n}
        return ProjComplex(self.A, terms, diffs, self.exact_lo, check=False)

    def window(self, lo: int) -> "ProjComplex":
        """The part in degrees >= lo, flagged as a window unless nothing is cut."""
        terms = {i: t for i, t in self.terms.items() if i >= lo}
        cut = any(t for i, t in self.terms.items() if i < lo) or not self.exact_lo
        if cut:
            terms.setdefault(lo, [])
            for i in range(lo, self.hi + 1):
                terms.setdefault(i, [])
        diffs = {i: D for i, D in self.diffs.items() if i >= lo}
        return ProjComplex(self.A, terms, diffs, exact_lo=not cut, check=False)

    def __repr__(self):
        body = ", ".join(f"{i}:{self.A.vertices and [self.A.vertices[v] for v in t]}"
                         for i, t in sorted(self.terms.items()))
        return f"ProjComplex({body}{'' if self.exact_lo else ', window'})"


def stalk_projective(A: BasedAlgebra, verts, degree: int = 0) -> ProjComplex:
    return ProjComplex(A, {degree: list(verts)}, {}, True, check=False)


def direct_sum_complex(X: ProjComplex, Y: ProjComplex) -> ProjComplex:
    A = X.A
    lo = min(X.lo, Y.lo)
    hi = max(X.hi, Y.hi)
    terms, diffs = {}, {}
    for i in range(lo, hi + 1):
        terms[i] = X.term(i) + Y.term(i)
    for i in range(lo, hi):
        a1, b1 = len(X.term(i)), len(X.term(i + 1))
        a2, b2 = len(Y.term(i)), len(Y.term(i + 1))
        D = _empty(a1 + a2, b1 + b2, A.dim)
        D[:a1, :b1] = X.D(i)
        D[a1:, b1:] = Y.D(i)
        diffs[i] = D
    exact = X.exact_lo and Y.exact_lo
    return ProjComplex(A, terms, diffs, exact, check=False)


@dataclass
class ChainMap:
    dom: ProjComplex
    cod: ProjComplex
    F: dict  # degree -> array (len(dom.term(i)), len(cod.term(i)), dim A)

    def comp(self, i):
        F = self.F.get(i)
        if F is None:
            return _empty(len(self.dom.term(i)), len(self.cod.term(i)), self.dom.A.dim)
        return F

    def validate(self):
        A = self.dom.A
        lo = min(self.dom.lo, self.cod.lo)
        hi = max(self.dom.hi, self.cod.hi)
        for i in range(lo, hi):
            lhs = algebra_mat_mul(A, self.dom.D(i), self.comp(i + 1))
            rhs = algebra_mat_mul(A, self.comp(i), self.cod.D(i))
            if not np.array_equal(lhs, rhs):
                raise InvariantViolation(f"chain map: square at degree {i} does not commute")
        return True

    def is_iso(self) -> bool:
        return all(_degree_invertible(self.dom.A, self.dom.term(i), self.cod.term(i), self.comp(i))
                   for i in set(self.dom.terms) | set(self.cod.terms))


def identity_chain_map(X: ProjComplex) -> ChainMap:
    A = X.A
    F = {}
    for i, t in X.terms.items():
        M = _empty(len(t), len(t), A.dim)
        for j, v in enumerate(t):
            M[j, j, A.idem[v]] = 1
        F[i] = M
    return ChainMap(X, X, F)


def cone(f: ChainMap) -> ProjComplex:
    """cone(f)^i = dom^{i+1} + cod^i, d(x, y) = (-d x, f x + d y)."""
    X, Y = f.dom, f.cod
    A = X.A
    p = A.p
    lo = min(X.lo - 1, Y.lo)
    hi = max(X.hi - 1, Y.hi)
    terms, diffs = {}, {}
    for i in range(lo, hi + 1):
        terms[i] = X.term(i + 1) + Y.term(i)
    for i in range(lo, hi):
        ax, ay = len(X.term(i + 1)), len(Y.term(i))
        bx, by = len(X.term(i + 2)), len(Y.term(i + 1))
        D = _empty(ax + ay, bx + by, A.dim)
        D[:ax, :bx] = (-X.D(i + 1)) % p
        D[:ax, bx:] = f.comp(i + 1)
        D[ax:, bx:] = Y.D(i)
        diffs[i] = D
    return ProjComplex(A, terms, diffs, X.exact_lo and Y.exact_lo, check=True)


# ---------------------------------------------------------------------------
# minimization

def minimize(X: ProjComplex) -> ProjComplex:
    """Split off contractible summands P(v) -=-> P(v) until the complex is radical."""
    A = X.A
    p = A.p
    terms = {i: list(t) for i, t in X.terms.items()}
    diffs = {i: D.copy() for i, D in X.diffs.items()}
    while True:
        found = None
        for i in sorted(diffs):
            D = diffs[i]
            if not D.size:
                continue
            for j, u in enumerate(terms[i]):
                for k, v in enumerate(terms[i + 1]):
                    if u == v and D[j, k, A.idem[u]] % p:
                        found = (i, j, k)
                        break
                if found:
                    break
            if found:
                break
        if not found:
            break
        i, j, k = found
        D = diffs[i]
        u = terms[i][j]
        xinv = A.inverse_local(D[j, k], u)
        # D'[b, e] = D[b, e] - D[b, k] x^{-1} D[j, e]
        col = D[:, k:k + 1, :]  # (a, 1, dim)
        row = D[j:j + 1, :, :]  # (1, b, dim)
        xrow = algebra_mat_mul(A, xinv.reshape(1, 1, -1), row)
        corr = algebra_mat_mul(A, col, xrow)
        Dn = (D - corr) % p
        Dn = np.delete(np.delete(Dn, j, axis=0), k, axis=1)
        diffs[i] = Dn
        if i - 1 in diffs:
            diffs[i - 1] = np.delete(diffs[i - 1], j, axis=1)
        if i + 1 in diffs:
            diffs[i + 1] = np.delete(diffs[i + 1], k, axis=0)
        del terms[i][j]
        del terms[i + 1][k]
    out = ProjComplex(A, terms, diffs, X.exact_lo, check=False)
    if not X.exact_lo:
        # keep the window's lowest degree even if it became empty
        if X.lo not in out.terms:
            out = ProjComplex(A, {**{X.lo: []}, **out.terms}, out.diffs, False, check=False)
    return out


# ---------------------------------------------------------------------------
# resolutions

@dataclass
class Resolution:
    complex: ProjComplex  # minimal, radical
    source: ModuleComplex
    window_lo: int  # lowest degree computed
    complete: bool  # True when the resolution is bounded (perfect input)


def resolve_complex(X: ModuleComplex, window: int = 2, lo: int | None = None,
                    minimal: bool = True, budget: int = 4000) -> Resolution:
    """Minimal projective resolution of a bounded complex on [lo, hi(X)].

    ``lo`` defaults to lo(X) - window.  The construction works from the top
    degree down, keeping the mapping cone of the comparison map acyclic.
    """
    A = X.A
    p = A.p
    xlo, xhi = X.degrees
    if xhi < xlo:
        Z = ProjComplex(A, {0: []}, {}, True, check=False)
        return Resolution(Z, X, 0, True)
    target = lo if lo is not None else xlo - window
    terms, diffs = {}, {}
    P_mod, dP, F = {}, {}, {}
    complete = False
    zeroA = mr.zero_module(A)
    i = xhi
    while i >= target:
        P1 = P_mod.get(i + 1, zeroA)
        Xi = X.mod(i)
        # C^i = P^{i+1} + X^i,  d_C(p, x) = (-d_P p, f p + d_X x)
        Ci, _, _ = mr.direct_sum([P1, Xi])
        P2 = P_mod.get(i + 2, zeroA)
        X1 = X.mod(i + 1)
        dXi = X.d(i)
        dXm = X.d(i - 1)
        Xm = X.mod(i - 1)
        Zb, Bb = [], []
        for v in range(A.nv):
            n1, nx = P1.dims[v], Xi.dims[v]
            rows2, rowsx = P2.dims[v], X1.dims[v]
            M = la.zeros(rows2 + rowsx, n1 + nx)
            if i + 1 in dP and n1 and rows2:
                M[:rows2, :n1] = (-dP[i + 1].mats[v]) % p
            if i + 1 in F and n1 and rowsx:
                M[rows2:, :n1] = F[i + 1].mats[v]
            if nx and rowsx:
                M[rows2:, n1:] = dXi.mats[v]
            Zb.append(la.nullspace(M, p) if n1 + nx else la.zeros(0, 0))
            B = la.zeros(n1 + nx, Xm.dims[v])
            if Xm.dims[v] and nx:
                B[n1:, :] = dXm.mats[v]
            Bb.append(B)
        RZ = mr.rad_bases(Ci, Zb)
        gens = []
        for v in range(A.nv):
            if Zb[v].shape[1] == 0:
                continue
            base = np.concatenate([RZ[v], Bb[v]], axis=1)
            base = la.colspace(base, p) if base.shape[1] else base
            for j in la.extend_basis(base, Zb[v], p):
                gens.append((v, Zb[v][:, j].copy()))
        verts = [v for v, _ in gens]
        if sum(sum(len(b) for b in A.by_source[v]) for v in verts) > budget:
            raise ResourceError(f"resolve_complex: projective term at degree {i} exceeds budget {budget}")
        Pi = mr.proj_sum(A, verts)
        terms[i] = verts
        P_mod[i] = Pi
        g1 = [(v, (-g[:P1.dims[v]]) % p) for v, g in gens]
        g2 = [(v, g[P1.dims[v]:]) for v, g in gens]
        F[i] = mr.map_from_projective(Xi, g2, Pi)
        if i + 1 in terms:
            dP[i] = mr.map_from_projective(P1, g1, Pi)
            D = _empty(len(verts), len(terms[i + 1]), A.dim)
            for j, (v, g) in enumerate(g1):
                for k, y in enumerate(mr.proj_element_split(A, terms[i + 1], v, g)):
                    D[j, k] = y
            diffs[i] = D
        if i < xlo and not verts:
            complete = True
            break
        i -= 1
    P = ProjComplex(A, terms, diffs, exact_lo=complete, check=True)
    if minimal:
        P = minimize(P)
        if not P.is_radical():
            raise InvariantViolation("resolve_complex: minimization left a non-radical differential "
                                     "(window too small)")
    return Resolution(P, X, min(terms) if terms else target, complete)


def as_module_complex(X) -> ModuleComplex:
    if isinstance(X, ModuleComplex):
        return X
    if isinstance(X, ProjComplex):
        return X.to_module_complex()
    if isinstance(X, ModuleRep):
        return stalk(X)
    raise TypeError("expected a module, module complex or projective complex")


def syzygy_complex(X, n: int, extra: int = 1, P: ProjComplex | None = None) -> ProjComplex:
    """Omega^n_D(X) = P_{<= -n}[-n] for a minimal resolution P of X.

    ``extra`` is the number of degrees kept below degree 0 of the result when
    the resolution is unbounded.  A given ``P`` must reach degree -n-extra
    unless it is exact.
    """
    if P is None:
        if isinstance(X, ProjComplex) and X.exact_lo and X.is_radical():
            P = X
        else:
            MX = as_module_complex(X)
            lo = min(MX.lo, -n) - extra
            P = resolve_complex(MX, lo=lo).complex
    if not P.exact_lo and P.lo > -n - extra:
        raise ResourceError(f"syzygy_complex: resolution window ends at {P.lo}, need {-n - extra}")
    return P.truncate_le(-n).shift(-n)


def cosyzygy_complex(X, n: int, extra: int = 1) -> ProjComplex:
    """Omega_n^D(X), realized over the opposite algebra: Omega_D^n(D X), whose dual is the cosyzygy."""
    MX = as_module_complex(X)
    return syzygy_complex(dual_module_complex(MX), n, extra)


# ---------------------------------------------------------------------------
# isomorphism testing

def _degree_invertible(A, rows, cols, F) -> bool:
    if sorted(rows) != sorted(cols):
        return False
    for v in set(rows):
        r = [j for j, u in enumerate(rows) if u == v]
        c = [k for k, w in enumerate(cols) if w == v]
        M = np.array([[F[j, k, A.idem[v]] for k in c] for j in r], dtype=np.int64)
        if not la.is_invertible(M % A.p, A.p):
            return False
    return True


@dataclass
class IsoResult:
    verdict: str  # isomorphic | distinct | inconclusive
    reason: str = ""
    witness: ChainMap | None = None

    def __bool__(self):
        return self.verdict == "isomorphic"


CHAIN_MAP_ENTRY_BUDGET = 40_000_000


def chain_map_space(X: ProjComplex, Y: ProjComplex, degrees=None):
    """Basis of chain maps X -> Y on the given degrees (default: all)."""
    A = X.A
    p = A.p
    if degrees is None:
        degrees = sorted(set(X.terms) | set(Y.terms))
    unknowns = []  # (degree, j, k, basis index)
    for i in degrees:
        for j, u in enumerate(X.term(i)):
            for k, w in enumerate(Y.term(i)):
                for b in A.block(u, w):
                    unknowns.append((i, j, k, b))
    if not unknowns:
        return [], unknowns
    L = A.left_basis_mats
    eq_index = {}
    rows = []
    cols = []
    vals = []

    def eq(i, j2, k2, coord):
        key = (i, j2, k2, coord)
        r = eq_index.get(key)
        if r is None:
            r = eq_index[key] = len(eq_index)
        return r

    dset = set(degrees)
    for col, (i, j, k, b) in enumerate(unknowns):
        # F_i[j, k] = b enters the square d_X^i F_{i+1} = F_i d_Y^i as -b * D^Y_i[k, :]
        # and the square at degree i-1 as D^X_{i-1}[:, j] * b
        DY = Y.D(i)
        for k2 in range(DY.shape[1]):
            y = DY[k, k2]
            if y.any():
                prod = la.matmul(L[b], y.reshape(-1, 1), p).reshape(-1)
                for c in np.flatnonzero(prod):
                    rows.append(eq(i, j, k2, int(c)))
                    cols.append(col)
                    vals.append((-prod[c]) % p)
        DX = X.D(i - 1)
        for j2 in range(DX.shape[0]):
            x = DX[j2, j]
            if x.any():
                prod = la.matmul(A.rmat(A.unit(b)), x.reshape(-1, 1), p).reshape(-1)
                for c in np.flatnonzero(prod):
                    rows.append(eq(i - 1, j2, k, int(c)))
                    cols.append(col)
                    vals.append(prod[c] % p)
    # keep only equations for squares whose both ends are in the degree set
    keep = {key: r for key, r in eq_index.items() if key[0] in dset and key[0] + 1 in dset}
    n = len(unknowns)
    if len(keep) * n > CHAIN_MAP_ENTRY_BUDGET:
        raise ResourceError(f"chain_map_space: system of size {len(keep)} x {n} exceeds the budget")
    pos = {r: i for i, r in enumerate(sorted(keep.values()))}
    M = la.zeros(len(pos), n)
    for r, c, v in zip(rows, cols, vals):
        i = pos.get(r)
        if i is not None:
            M[i, c] = (M[i, c] + v) % p
    N = la.nullspace(M, p) if M.shape[0] else la.eye(n)
    return N, unknowns


def _assemble(X, Y, unknowns, vec, degrees):
    A = X.A
    F = {i: _empty(len(X.term(i)), len(Y.term(i)), A.dim) for i in degrees}
    for (i, j, k, b), c in zip(unknowns, vec):
        if c:
            F[i][j, k, b] = (F[i][j, k, b] + int(c)) % A.p
    return ChainMap(X, Y, F)


def complex_iso_test(X: ProjComplex, Y: ProjComplex, trials: int = 64, seed: int = 0) -> IsoResult:
    """Three-valued isomorphism test for radical complexes (on their stored windows)."""
    A = X.A
    if X.A is not Y.A:
        raise InvariantViolation("complex_iso_test: complexes over different algebras")
    if not (X.exact_lo and Y.exact_lo):
        # compare on the common window only
        lo = max(X.lo, Y.lo)
        X, Y = X.window(lo), Y.window(lo)
    mx, my = X.multisets(), Y.multisets()
    if mx != my:
        return IsoResult("distinct", f"degreewise projectives differ: {_fmt(A, mx)} vs {_fmt(A, my)}")
    hx, hy = X.cohomology_dims(), Y.cohomology_dims()
    common = set(hx) & set(hy)
    if any(hx[i] != hy[i] for i in common):
        return IsoResult("distinct", "cohomology dimensions differ")
    degrees = sorted(i for i in set(X.terms) | set(Y.terms) if X.term(i) or Y.term(i))
    if not degrees:
        return IsoResult("isomorphic", "both zero", ChainMap(X, Y, {}))
    if all(X.term(i) == Y.term(i) for i in degrees) and all(
            np.array_equal(X.D(i), Y.D(i)) for i in degrees):
        ident = identity_chain_map(X)
        return IsoResult("isomorphic", "identical", ChainMap(X, Y, ident.F))
    N, unknowns = chain_map_space(X, Y, degrees)
    if not len(unknowns) or N.shape[1] == 0:
        return IsoResult("inconclusive", "no nonzero chain maps on the window")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        c = rng.integers(0, A.p, size=N.shape[1])
        vec = la.matmul(N, c.reshape(-1, 1), A.p).reshape(-1)
        f = _assemble(X, Y, unknowns, vec, degrees)
        if all(_degree_invertible(A, X.term(i), Y.term(i), f.comp(i)) for i in degrees):
            f.validate()
            return IsoResult("isomorphic", "degreewise invertible chain map", f)
    return IsoResult("inconclusive", f"no invertible chain map in {trials} trials")


def _fmt(A, ms):
    return {i: [A.vertices[v] for v in t] for i, t in sorted(ms.items())}


def chain_map_from_modules(X: ProjComplex, Y: ProjComplex, maps: dict) -> ChainMap:
    """Translate per-degree ModuleMaps between the projective terms into a ChainMap."""
    A = X.A
    F = {}
    for i, f in maps.items():
        tx, ty = X.term(i), Y.term(i)
        M = _empty(len(tx), len(ty), A.dim)
        Px = X.module(i)
        for j, u in enumerate(tx):
            # generator j of X^i, in Px coordinates at vertex u
            e = np.zeros(Px.dims[u], dtype=np.int64)
            pos = sum(len(A.block(u, v)) for v in tx[:j])
            e[pos + A.block(u, u).index(A.idem[u])] = 1
            img = la.matmul(f.mats[u], e.reshape(-1, 1), A.p).reshape(-1)
            for k, y in enumerate(mr.proj_element_split(A, ty, u, img)):
                M[j, k] = y
        F[i] = M
    return ChainMap(X, Y, F)


def random_radical_chain_map(X: ProjComplex, Y: ProjComplex, rng, degrees=None) -> ChainMap:
    N, unknowns = chain_map_space(X, Y, degrees)
    degs = degrees if degrees is not None else sorted(set(X.terms) | set(Y.terms))
    if not len(unknowns) or N.shape[1] == 0:
        return ChainMap(X, Y, {})
    c = rng.integers(0, X.A.p, size=N.shape[1])
    vec = la.matmul(N, c.reshape(-1, 1), X.A.p).reshape(-1)
    return _assemble(X, Y, unknowns, vec, degs)


# ---------------------------------------------------------------------------
# text format

def complex_text(X: ProjComplex) -> str:
    A = X.A
    lines = [f"complex window [{X.lo},{X.hi}]" + ("" if X.exact_lo else " open")]
    for i in range(X.lo, X.hi + 1):
        t = X.term(i)
        obj = " + ".join(f"P({A.vertices[v]})" for v in t) if t else "0"
        lines.append(f"object {i} = {obj}")
    for i in range(X.lo, X.hi):
        D = X.D(i)
        if not D.size:
            continue
        rows = []
        for j in range(D.shape[0]):
            rows.append("[" + ", ".join(_elem_text(A, D[j, k]) for k in range(D.shape[1])) + "]")
        lines.append(f"d {i} = [" + ", ".join(rows) + "]")
    return "\n".join(lines) + "\n"


def _elem_text(A, x) -> str:
    terms = []
    for b in np.flatnonzero(x):
        c = int(x[b])
        terms.append(f"{c}*{A.labels[b]}" if c != 1 else A.labels[b])
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# syzygy lemma harness

@dataclass
class Check:
    name: str
    verdict: str  # pass | fail | inconclusive | skipped
    detail: str = ""


@dataclass
class Transcript:
    checks: list

    @property
    def ok(self):
        return all(c.verdict in ("pass", "skipped") for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.verdict in ("fail", "inconclusive")]

    def text(self):
        return "\n".join(f"{c.verdict:>12}  {c.name}  {c.detail}" for c in self.checks) + "\n"


def _perfect_input(X) -> bool:
    return isinstance(X, ProjComplex) and X.exact_lo


def _resolution(X, lo: int) -> ProjComplex:
    MX = as_module_complex(X)
    return resolve_complex(MX, lo=min(lo, MX.lo - 1)).complex


def _omega(P: ProjComplex, n: int) -> ProjComplex:
    return P.truncate_le(-n).shift(-n)


def _iso_check(name, X, Y, trials, seed):
    r = complex_iso_test(minimize(X), minimize(Y), trials, seed)
    v = {"isomorphic": "pass", "distinct": "fail", "inconclusive": "inconclusive"}[r.verdict]
    return Check(name, v, r.reason)


def _concentrated_in_zero(P: ProjComplex):
    h = P.cohomology_dims()
    bad = {i: d for i, d in h.items() if i != 0 and d}
    return not bad, h


def check_syzygy_axioms(X, Y=None, n: int = 1, m: int = 1, seed: int = 0, extra: int = 1,
                        trials: int = 64, abort: bool = False) -> Transcript:
    """Verify the syzygy-complex identities on explicit instances.

    X and Y are modules, module complexes or complexes of projectives.
    Checks: shift compatibility, composition of syzygies, additivity,
    placement of Omega^{-s} for complexes in degrees >= s (and its dual
    form for cosyzygies), perfectness transfer, the truncation triangle
    Omega^{n+1} -> Q -> Omega^n with Q projective, and the triangle on
    syzygies induced by a chain map between perfect complexes.  A check
    whose resolution exceeds the budget is reported as skipped.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    rng = np.random.default_rng(seed)
    MX = as_module_complex(X)
    MY = as_module_complex(Y) if Y is not None else None
    A = MX.A
    ctx = {}

    def PX():
        if "PX" not in ctx:
            lo = min(MX.lo, -n - m, MY.lo if MY is not None else 0) - extra - 1
            ctx["PX"] = _resolution(MX, lo)
        return ctx["PX"]

    def shift():
        P = PX()
        PXm = _resolution(MX.shift(m), P.lo - m)
        return _iso_check("shift", _omega(PXm, n + m), _omega(P, n), trials, seed)

    def composition():
        P = PX()
        On = _omega(P, n)
        POn = _resolution(On, On.lo - 1)
        return _iso_check("composition", _omega(POn, m), _omega(P, n + m), trials, seed)

    def additivity():
        if MY is None:
            return Check("additivity", "skipped", "no second complex")
        P = PX()
        PY = _resolution(MY, P.lo)
        PS = _resolution(module_complex_sum(MX, MY), P.lo)
        return _iso_check("additivity", _omega(PS, n), direct_sum_complex(_omega(P, n), _omega(PY, n)),
                          trials, seed)

    def placement():
        s = MX.lo
        P = resolve_complex(MX, lo=s - 2).complex
        ok, h = _concentrated_in_zero(_omega(P, -s))
        return Check("placement", "pass" if ok else "fail", f"s={s}, cohomology {h}")

    def dual_placement():
        t = MX.hi
        DX = dual_module_complex(MX)
        PD = resolve_complex(DX, lo=-t - 2).complex
        ok, h = _concentrated_in_zero(_omega(PD, t))
        return Check("dual-placement", "pass" if ok else "fail", f"t={t}, cohomology {h}")

    def perfectness():
        P = PX()
        On = _omega(P, n)
        perfect_O = On.exact_lo and _resolution(On, On.lo - 2).exact_lo
        return Check("perfectness", "pass" if P.exact_lo == perfect_O else "fail",
                     f"X perfect: {P.exact_lo}, Omega^{n}(X) perfect: {perfect_O} (on the window)")

    def x_tri():
        P = PX()
        O1 = _omega(P, n + 1)
        Qt = P.term(-n)
        Q = stalk_projective(A, Qt, 0)
        h = ChainMap(O1, Q, {0: P.D(-n - 1)} if P.term(-n - 1) and Qt else {})
        h.validate()
        return _iso_check("x-tri", cone(h), _omega(P, n), trials, seed)

    def omega_shift():
        if not (_perfect_input(X) and (Y is None or _perfect_input(Y))):
            return Check("omega-shift", "skipped", "needs perfect inputs")
        P = PX()
        PY = _resolution(Y, P.lo) if Y is not None else P
        f = random_radical_chain_map(P, PY, rng)
        f.validate()
        Z = cone(f)
        PZ = _resolution(Z, Z.lo - 1)
        OX, OY = _omega(P, n), _omega(PY, n)
        Pn = P.term(-n + 1)
        tgt = direct_sum_complex(OY, stalk_projective(A, Pn, 0))
        G = {}
        for j in range(OX.lo, 1):
            Fj = f.comp(j - n)
            M = _empty(len(OX.term(j)), len(tgt.term(j)), A.dim)
            M[:, :Fj.shape[1]] = Fj
            if j == 0 and Pn:
                M[:, len(OY.term(0)):] = (-P.D(-n)) % A.p
            G[j] = M
        g = ChainMap(OX, tgt, G)
        g.validate()
        return _up_to_projective_stalk("omega-shift", minimize(cone(g)), minimize(_omega(PZ, n)), trials, seed)

    out = []
    for name, fn in [("shift", shift), ("composition", composition), ("additivity", additivity),
                     ("placement", placement), ("dual-placement", dual_placement),
                     ("perfectness", perfectness), ("x-tri", x_tri), ("omega-shift", omega_shift)]:
        try:
            out.append(fn())
        except ResourceError as e:
            out.append(Check(name, "skipped", f"budget: {e}"))
    tr = Transcript(out)
    if abort and not tr.ok:
        bad = tr.failures()[0]
        raise InvariantViolation(f"syzygy harness: {bad.name} {bad.verdict} ({bad.detail}) on\n"
                                 + complex_text(as_proj(X)))
    return tr


def as_proj(X) -> ProjComplex:
    if isinstance(X, ProjComplex):
        return X
    MX = as_module_complex(X)
    return resolve_complex(MX, lo=MX.lo - 1).complex


def _up_to_projective_stalk(name, X, Y, trials, seed):
    """Iso test after padding degree 0 with the projective difference, if that is all that differs."""
    mx, my = X.multisets(), Y.multisets()
    degs = (set(mx) | set(my)) - {0}
    if any(mx.get(i, ()) != my.get(i, ()) for i in degs):
        return Check(name, "fail", "terms differ outside degree 0")
    a, b = list(mx.get(0, ())), list(my.get(0, ()))
    for v in list(b):
        if v in a:
            a.remove(v)
            b.remove(v)
    if a and b:
        return Check(name, "fail", "degree 0 terms are not comparable up to a projective")
    if a:
        Y = direct_sum_complex(Y, stalk_projective(X.A, a, 0))
    if b:
        X = direct_sum_complex(X, stalk_projective(X.A, b, 0))
    r = complex_iso_test(X, Y, trials, seed)
    v = {"isomorphic": "pass", "distinct": "fail", "inconclusive": "inconclusive"}[r.verdict]
    pad = [X.A.vertices[u] for u in a + b]
    return Check(name, v, r.reason + (f" (projective summand {pad})" if pad else ""))
