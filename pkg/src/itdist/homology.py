"""Projective covers, minimal resolutions, syzygies, Ext and dimensions.

Differentials between sums of indecomposable projectives are stored as
arrays ``D`` of shape (len(rows), len(cols), dim A): the j-th generator
e_{u_j} of the source maps to sum_k D[j, k] in the target, where
D[j, k] lies in e_{u_j} A e_{v_k} and acts by right multiplication.
The composite of D (degree i -> i-1) after D' (degree i+1 -> i) is the
matrix product D' D with entries multiplied in A.

Cosyzygies and injective dimensions go through the duality D and the
opposite algebra; the results are correct up to isomorphism.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from . import modrep as mr
from .algebra import BasedAlgebra
from .constructions import dual
from .errors import ResourceError
from .modrep import ModuleMap, ModuleRep

DEFAULT_CUTOFF = 32
# largest projective term (total dimension) a resolution may build
DEFAULT_DIM_BUDGET = 1500


@dataclass(frozen=True)
class DimensionAnswer:
    """An exact value, or an unknown value known to be at least ``lower``."""

    value: int | None = None
    lower: int | None = None

    @property
    def known(self) -> bool:
        return self.value is not None

    def __str__(self):
        return str(self.value) if self.known else f"Unknown(>={self.lower})"

    def as_json(self):
        return self.value if self.known else {"unknown_at_least": self.lower}

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other
        if isinstance(other, DimensionAnswer):
            return (self.value, self.lower) == (other.value, other.lower)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.lower))


def algebra_mat_mul(A: BasedAlgebra, D1, D2):
    """Matrix product over A: (D1 D2)[l, k] = sum_j D1[l, j] * D2[j, k]."""
    n1, m = D1.shape[:2]
    m2, n2 = D2.shape[:2]
    if m != m2:
        raise ValueError("shape mismatch")
    out = np.zeros((n1, n2, A.dim), dtype=np.int64)
    if m == 0:
        return out
    T = A.table.reshape(A.dim, -1)
    for l in range(n1):
        for j in range(m):
            x = D1[l, j]
            if not x.any():
                continue
            L = la.matmul(x.reshape(1, -1), T, A.p).reshape(A.dim, A.dim)  # rows: y, cols: x*y
            out[l] = (out[l] + la.matmul(D2[j], L, A.p)) % A.p
    return out


def is_radical_matrix(A: BasedAlgebra, D) -> bool:
    idem = list(A.idem)
    return not np.asarray(D)[..., idem].any() if np.asarray(D).size else True


def projective_cover(M: ModuleRep):
    """(P, f): P = sum of P(v) over a basis of top(M), f the surjection."""
    gens = mr.top_generators(M)
    P = mr.proj_sum(M.A, [v for v, _ in gens])
    f = mr.map_from_projective(M, gens, P)
    P.summands = tuple(v for v, _ in gens)
    return P, f


@dataclass
class ResolutionSegment:
    """P_0 <- P_1 <- ... <- P_L, with the cover P_0 -> M."""

    module: ModuleRep
    terms: list  # list of vertex lists (generators of P_i)
    differentials: list  # differentials[i] : P_{i+1} -> P_i as algebra-element arrays
    syzygies: list  # syzygies[i] = Omega^i(M), realised inside P_{i-1}
    complete: bool = False  # True when Omega^{L+1}(M) = 0
    truncated: bool = False  # stopped early by the dimension budget

    @property
    def projectives(self):
        """P_i as ModuleRep (built on demand from the vertex lists)."""
        return [mr.proj_sum(self.module.A, verts) for verts in self.terms]

    @property
    def length(self):
        return len(self.terms) - 1

    def betti(self, A: BasedAlgebra | None = None):
        A = A or self.module.A
        out = []
        for verts in self.terms:
            row = [0] * A.nv
            for v in verts:
                row[v] += 1
            out.append(row)
        return out

    def betti_table(self) -> str:
        A = self.module.A
        head = "deg | " + " ".join(f"{v:>4}" for v in A.vertices)
        lines = [head, "-" * len(head)]
        for i, row in enumerate(self.betti()):
            lines.append(f"{i:>3} | " + " ".join(f"{x:>4}" for x in row))
        return "\n".join(lines)


class _Resolver:
    """Incrementally extended minimal resolution of a module (cached on it)."""

    def __init__(self, M: ModuleRep):
        self.M = M
        A = M.A
        P, f = projective_cover(M)
        self.seg = ResolutionSegment(M, [list(P.summands)], [], [M])
        self._prev = P
        # current kernel, as a submodule of the last projective
        self._last_map = f
        self._kernel = None
        self._advance_kernel()
        self.A = A

    def _advance_kernel(self):
        f = self._last_map
        P = f.dom
        p = f.p
        kb = []
        for v in range(P.A.nv):
            F = f.mats[v]
            if P.dims[v] == 0:
                kb.append(la.zeros(0, 0))
            elif F.shape[0] == 0:
                kb.append(la.eye(P.dims[v]))
            else:
                kb.append(la.nullspace(F, p))
        self._kernel_bases = kb
        K, _ = mr.submodule(P, kb)
        self._kernel = K

    def extend_to(self, L: int, budget: int = DEFAULT_DIM_BUDGET):
        seg = self.seg
        A = self.M.A
        seg.truncated = False
        while seg.length < L and not seg.complete:
            K = self._kernel
            if K.dim == 0:
                seg.complete = True
                break
            seg.syzygies.append(K)
            prev = self._prev
            prev_verts = seg.terms[-1]
            kb = self._kernel_bases
            # generators of K inside prev (top of K)
            rk = mr.rad_bases(prev, kb)
            gens = []
            for u in range(A.nv):
                for j in la.extend_basis(rk[u], kb[u], A.p):
                    gens.append((u, kb[u][:, j].copy()))
            verts = [u for u, _ in gens]
            if sum(sum(len(b) for b in A.by_source[u]) for u in verts) > budget:
                seg.syzygies.pop()
                seg.truncated = True
                break
            D = np.zeros((len(gens), len(prev_verts), A.dim), dtype=np.int64)
            for j, (u, x) in enumerate(gens):
                for k, y in enumerate(mr.proj_element_split(A, prev_verts, u, x)):
                    D[j, k] = y
            Pn = mr.proj_sum(A, verts)
            fmap = mr.map_from_projective(prev, gens, Pn)
            seg.terms.append(verts)
            seg.differentials.append(D)
            self._prev = Pn
            self._last_map = fmap
            self._advance_kernel()
            # finished levels: drop memoized action matrices (rebuilt lazily on demand)
            prev._memo.clear()
            seg.syzygies[-1]._memo.clear()
        if seg.length >= L and self._kernel.dim == 0:
            seg.complete = True
        return seg


def _resolver(M: ModuleRep) -> _Resolver:
    r = M.__dict__.get("_resolver")
    if r is None:
        r = _Resolver(M)
        M.__dict__["_resolver"] = r
    return r


def min_resolution(M: ModuleRep, cutoff: int = DEFAULT_CUTOFF,
                   budget: int = DEFAULT_DIM_BUDGET) -> ResolutionSegment:
    """Minimal projective resolution up to P_cutoff (shorter if it stops).

    ``truncated`` is set when a projective term would exceed ``budget``.
    """
    if M.dim == 0:
        return ResolutionSegment(M, [[]], [], [M], complete=True)
    seg = _resolver(M).extend_to(cutoff, budget)
    n = min(cutoff, seg.length) + 1
    return ResolutionSegment(M, seg.terms[:n], seg.differentials[:n - 1], seg.syzygies[:n],
                             complete=seg.complete and seg.length <= cutoff,
                             truncated=seg.truncated and seg.length < cutoff)


def syzygy(M: ModuleRep, n: int = 1, budget: int = DEFAULT_DIM_BUDGET) -> ModuleRep:
    """Omega^n(M) (Omega^0 = M); zero once the resolution stops."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0 or M.dim == 0:
        return M if n == 0 else mr.zero_module(M.A)
    r = _resolver(M)
    seg = r.extend_to(n - 1, budget)
    if seg.truncated:
        raise ResourceError(f"syzygy: projective terms exceed the dimension budget {budget} before degree {n}")
    if n < len(seg.syzygies):
        return seg.syzygies[n]
    if n == len(seg.syzygies) and r._kernel is not None:
        return r._kernel
    return mr.zero_module(M.A)


def cosyzygy(M: ModuleRep, n: int = 1) -> ModuleRep:
    """Omega^{-n}(M) computed as D Omega^n D(M) (up to isomorphism)."""
    return dual(syzygy(dual(M), n))


def pd(M: ModuleRep, cutoff: int = DEFAULT_CUTOFF, budget: int = DEFAULT_DIM_BUDGET) -> DimensionAnswer:
    """Exact projective dimension if at most ``cutoff``, else Unknown(>=cutoff+1).

    If the dimension budget stops the resolution at degree n first (so
    Omega^{n-1}(M) is known not to be projective), the answer is Unknown(>=n).
    """
    cache = M.__dict__.setdefault("_pd_cache", {})
    key = (cutoff, budget)
    if key not in cache:
        # equal modules built separately (e.g. two copies of a simple) share one answer
        shared = M.A.__dict__.setdefault("_pd_by_content", {})
        ckey = (_content_key(M), cutoff, budget)
        if ckey not in shared:
            shared[ckey] = _pd(M, cutoff, budget)
        cache[key] = shared[ckey]
    return cache[key]


def _content_key(M: ModuleRep):
    h = hashlib.blake2b(digest_size=16)
    for m in M.mats:
        h.update(np.ascontiguousarray(m, dtype=np.int64).tobytes())
        h.update(b"|")
    return tuple(M.dims), h.hexdigest()


def _pd(M, cutoff, budget):
    if M.dim == 0:
        return DimensionAnswer(0)
    if is_selfinjective(M.A):
        # finite projective dimension forces projectivity over a self-injective algebra
        return DimensionAnswer(0) if mr.is_projective(M) else DimensionAnswer(None, cutoff + 1)
    for n in range(cutoff + 1):
        try:
            Om = syzygy(M, n, budget)
        except ResourceError:
            # a resolution that hit the budget is large and rarely reused
            M.__dict__.pop("_resolver", None)
            return DimensionAnswer(None, n)
        if mr.is_projective(Om):
            return DimensionAnswer(n)
    return DimensionAnswer(None, cutoff + 1)


def id_(M: ModuleRep, cutoff: int = DEFAULT_CUTOFF) -> DimensionAnswer:
    """Injective dimension, as pd of D(M) over the opposite algebra."""
    return pd(dual(M), cutoff)


def _hom_from_resolution_maps(seg: ResolutionSegment, N: ModuleRep, i: int):
    """Matrix of Hom(P_{i-1}, N) -> Hom(P_i, N) in the coordinates sum_j N_{u_j}."""
    A = N.A
    rows_v = seg.terms[i]
    cols_v = seg.terms[i - 1]
    D = seg.differentials[i - 1]
    ro = np.concatenate([[0], np.cumsum([N.dims[u] for u in rows_v])]).astype(int)
    co = np.concatenate([[0], np.cumsum([N.dims[v] for v in cols_v])]).astype(int)
    out = la.zeros(int(ro[-1]), int(co[-1]))
    for j, u in enumerate(rows_v):
        for k, v in enumerate(cols_v):
            if D[j, k].any() and N.dims[u] and N.dims[v]:
                out[ro[j]:ro[j + 1], co[k]:co[k + 1]] = N.act_elem(D[j, k], u, v)
    return out


def ext(M: ModuleRep, N: ModuleRep, i: int) -> int:
    """dim Ext^i_A(M, N)."""
    if i < 0:
        raise ValueError("i must be >= 0")
    if i == 0:
        return len(mr.hom_basis(M, N))
    seg = min_resolution(M, i + 1)
    if seg.truncated:
        raise ResourceError(f"ext: resolution exceeds the dimension budget before degree {i + 1}")
    if seg.length < i:
        return 0
    d_in = _hom_from_resolution_maps(seg, N, i)
    n_i = d_in.shape[0]
    rank_in = la.rank(d_in, N.p) if d_in.size else 0
    if seg.length >= i + 1:
        d_out = _hom_from_resolution_maps(seg, N, i + 1)
        ker_out = n_i - (la.rank(d_out, N.p) if d_out.size else 0)
    else:
        ker_out = n_i
    return ker_out - rank_in


def regular_module(A: BasedAlgebra) -> ModuleRep:
    return mr.proj_sum(A, list(range(A.nv)))


@dataclass
class SelfInjective:
    left: DimensionAnswer  # id of A as a left module
    right: DimensionAnswer  # id of A as a right module
    verdict: str
    s: int | None

    def as_json(self):
        return {"id_left": self.left.as_json(), "id_right": self.right.as_json(),
                "verdict": self.verdict}


def is_selfinjective(A: BasedAlgebra) -> bool:
    """Every indecomposable projective is isomorphic to an indecomposable injective.

    Both sides have A.nv pairwise non-isomorphic members, so this is a bijection.
    """
    hit = A.__dict__.get("_is_selfinj")
    if hit is None:
        inj = [mr.standard_module(A, "injective", v) for v in range(A.nv)]
        hit = all(any(mr.fingerprint(I) == mr.fingerprint(P) and mr.iso_indecomposable(P, I) is not None
                      for I in inj)
                  for P in (mr.standard_module(A, "projective", v) for v in range(A.nv)))
        A.__dict__["_is_selfinj"] = hit
    return hit


def selfinj_dims(A: BasedAlgebra, cutoff: int = DEFAULT_CUTOFF) -> SelfInjective:
    cache = A.__dict__.setdefault("_selfinj", {})
    if cutoff in cache:
        return cache[cutoff]
    Aop = A.opposite()
    left = _max_dims([pd(dual(mr.standard_module(A, "projective", v)), cutoff) for v in range(A.nv)], cutoff)
    right = _max_dims([pd(dual(mr.standard_module(Aop, "projective", v)), cutoff) for v in range(A.nv)], cutoff)
    if left.known and right.known and left.value == right.value:
        s = left.value
        verdict = "self-injective" if s == 0 else f"{s}-Gorenstein"
    else:
        s = None
        verdict = "Unknown"
    out = SelfInjective(left, right, verdict, s)
    cache[cutoff] = out
    return out


def _max_dims(vals, cutoff):
    if all(v.known for v in vals):
        return DimensionAnswer(max(v.value for v in vals) if vals else 0)
    # the maximum is at least every proven value and every proven lower bound
    return DimensionAnswer(None, max(v.value if v.known else v.lower for v in vals))


def gldim(A: BasedAlgebra, cutoff: int = DEFAULT_CUTOFF) -> DimensionAnswer:
    return _max_dims([pd(mr.standard_module(A, "simple", v), cutoff) for v in range(A.nv)], cutoff)


def hom_dual(M: ModuleRep) -> ModuleRep:
    """M* = Hom_A(M, A) as a left module over the opposite algebra.

    The vertex-v component is Hom_A(M, P(v)); the opposite arrow of a acts
    by post-composition with right multiplication by a.
    """
    A = M.A
    Aop = A.opposite()
    p = A.p
    bases = [mr.hom_basis(M, mr.standard_module(A, "projective", v)) for v in range(A.nv)]
    flats = [np.stack([f.total().reshape(-1) for f in B], axis=1) if B else None for B in bases]
    mats = []
    for k, a in enumerate(A.arrows):
        s, t = A.arrow_src[k], A.arrow_tgt[k]
        # r_a : P(t) -> P(s), x -> x*a
        Pt = mr.standard_module(A, "projective", t)
        Ps = mr.standard_module(A, "projective", s)
        ra_mats = []
        for w in range(A.nv):
            cols = A.by_source[t][w]
            rows = A.by_source[s][w]
            R = la.zeros(len(rows), len(cols))
            for c, x in enumerate(cols):
                y = A.table[x, a]
                for r, z in enumerate(rows):
                    R[r, c] = y[z]
            ra_mats.append(R)
        ra = ModuleMap(Pt, Ps, ra_mats)
        dt, ds = len(bases[t]), len(bases[s])
        X = la.zeros(ds, dt)
        if dt and ds:
            imgs = np.stack([mr.compose(ra, f).total().reshape(-1) for f in bases[t]], axis=1)
            X = la.solve(flats[s], imgs, p)
        elif dt and not ds:
            X = la.zeros(0, dt)
        mats.append(X)
    return ModuleRep(Aop, [len(b) for b in bases], mats, check=False)


def nonprojective_part(M: ModuleRep, seed: int = 0) -> ModuleRep:
    if M.dim == 0:
        return M
    d = mr.decompose(M, seed)
    keep = [f.dom for _, f in d.summands if not mr.is_projective(f.dom)]
    return mr.direct_sum(keep, M.A)[0]


@dataclass
class GprojVerdict:
    status: str  # certified-yes | certified-no | unknown
    reason: str
    witness: object = None

    def __str__(self):
        return f"{self.status} ({self.reason})"


def is_gproj(M: ModuleRep, cutoff: int = 8, seed: int = 0, gorenstein_cutoff: int | None = None) -> GprojVerdict:
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    A = M.A
    if mr.is_projective(M):
        return GprojVerdict("certified-yes", "projective")
    si = selfinj_dims(A, gorenstein_cutoff if gorenstein_cutoff is not None else cutoff)
    if si.s is not None and si.s <= cutoff:
        s = si.s
        if s == 0:
            return GprojVerdict("certified-yes", "self-injective algebra: every module is an Omega^0")
        N = cosyzygy(M, s)
        OsN = syzygy(N, s)
        ok, w = mr.is_isomorphic(nonprojective_part(M, seed), nonprojective_part(OsN, seed), seed)
        if ok:
            return GprojVerdict("certified-yes", f"{s}-Gorenstein and M is an Omega^{s} up to projectives", w)
    R = regular_module(A)
    for i in range(1, cutoff + 1):
        if ext(M, R, i):
            return GprojVerdict("certified-no", f"Ext^{i}(M, A) != 0", i)
    Ms = hom_dual(M)
    Rop = regular_module(A.opposite())
    for i in range(1, cutoff + 1):
        if ext(Ms, Rop, i):
            return GprojVerdict("certified-no", f"Ext^{i}(M*, A) != 0 over the opposite algebra", i)
    Mss = hom_dual(Ms)
    ok, _ = mr.is_isomorphic(Mss, M, seed) if Mss.A is M.A else (False, None)
    if not ok:
        return GprojVerdict("certified-no", "M** is not isomorphic to M", Mss.dims)
    return GprojVerdict("unknown", f"Ext vanishing up to {cutoff} and M** isomorphic to M")
