"""Torsion radicals, layer lengths, Igusa-Todorov bounds and functions,
weak resolution witnesses, syzygy-finiteness certificates and the report.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import __version__
from . import homology as ho
from . import linalg as la
from . import modrep as mr
from .algebra import BasedAlgebra
from .constructions import fingerprint as algebra_fingerprint
from .errors import InvariantViolation, ResourceError
from .homology import DimensionAnswer
from .modrep import ModuleMap, ModuleRep

SUBSET_CAP_BITS = 12


def _vset(A: BasedAlgebra, V) -> frozenset:
    return frozenset(A.vertex_index(v) for v in (V or ()))


# ---------------------------------------------------------------------------
# torsion radical and layer length

def torsion_radical(M: ModuleRep, V) -> tuple[ModuleRep, ModuleMap]:
    """t_V(M): the submodule generated by the components of M at vertices outside V."""
    A = M.A
    Vs = _vset(A, V)
    gens = []
    for v in range(A.nv):
        if v in Vs:
            continue
        I = la.eye(M.dims[v])
        gens.extend((v, I[:, j]) for j in range(M.dims[v]))
    bases = mr.generated_bases(M, gens)
    return mr.submodule(M, bases)


@dataclass
class LayerLengthResult:
    value: int
    V: tuple
    chain: list  # t_V F^i (M), i = 0 .. value

    @property
    def chain_dims(self):
        return [X.dim for X in self.chain]


def layer_length(M: ModuleRep, V=()) -> LayerLengthResult:
    """inf{i >= 0 : t_V (rad t_V)^i (M) = 0}, by direct unrolling."""
    A = M.A
    Vs = _vset(A, V)
    cur = M
    chain = []
    i = 0
    while True:
        T, _ = torsion_radical(cur, Vs)
        chain.append(T)
        if T.dim == 0:
            return LayerLengthResult(i, tuple(A.vertices[v] for v in sorted(Vs)), chain)
        R, _ = mr.submodule(T, mr.rad_bases(T))
        if R.dim >= cur.dim and i > 0:
            raise InvariantViolation("layer_length: chain does not decrease")
        cur = R
        i += 1


def algebra_layer_length(A: BasedAlgebra, V=()) -> LayerLengthResult:
    return layer_length(ho.regular_module(A), V)


# ---------------------------------------------------------------------------
# the upper bound

@dataclass
class BoundRow:
    V: tuple
    layer_length: int
    bound: int

    def as_json(self):
        return {"V": list(self.V), "layer_length": self.layer_length, "bound": self.bound}


@dataclass
class ITBound:
    bound: int
    best_V: tuple
    table: list
    finite_pd: dict  # vertex -> DimensionAnswer
    exhaustive: bool

    def as_json(self):
        return {"bound": self.bound, "best_V": list(self.best_V),
                "table": [r.as_json() for r in self.table],
                "finite_pd_simples": {v: d.as_json() for v, d in self.finite_pd.items()},
                "exhaustive_over_V": self.exhaustive}


def it_upper_bound(A: BasedAlgebra, pd_cutoff: int = ho.DEFAULT_CUTOFF,
                   subset_budget: int = SUBSET_CAP_BITS) -> ITBound:
    pds = {A.vertices[v]: ho.pd(mr.standard_module(A, "simple", v), pd_cutoff) for v in range(A.nv)}
    fin = [v for v in range(A.nv) if pds[A.vertices[v]].known]
    if len(fin) <= subset_budget:
        subsets = [c for r in range(len(fin) + 1) for c in itertools.combinations(fin, r)]
        exhaustive = True
    else:
        subsets = [()] + [(v,) for v in fin] + [tuple(fin)]
        exhaustive = False
    R = ho.regular_module(A)
    rows = []
    for Vs in subsets:
        ll = layer_length(R, Vs).value
        rows.append(BoundRow(tuple(A.vertices[v] for v in Vs), ll, max(ll - 2, 0)))
    best = min(rows, key=lambda r: (r.bound, len(r.V), r.V))
    return ITBound(best.bound, best.V, rows, pds, exhaustive)


# ---------------------------------------------------------------------------
# catalogues of indecomposables

class Catalogue:
    """Indecomposable modules up to isomorphism, found by decomposition."""

    def __init__(self, seed: int = 0):
        self.items: list[ModuleRep] = []
        self.seed = seed

    def index(self, X: ModuleRep, add: bool = True):
        fp = mr.fingerprint(X)
        for i, Y in enumerate(self.items):
            if mr.fingerprint(Y) == fp and mr.iso_indecomposable(Y, X) is not None:
                return i
        if not add:
            return None
        self.items.append(X)
        return len(self.items) - 1

    def vector(self, M: ModuleRep, skip_projective: bool = True):
        """Multiplicities of the (non-projective) indecomposable summands of M."""
        counts = {}
        if M.dim == 0:
            return counts
        d = mr.decompose(M, self.seed)
        for X, m in d.classes:
            if skip_projective and mr.is_projective(X):
                continue
            i = self.index(X)
            counts[i] = counts.get(i, 0) + m
        return counts

    def pieces(self, M: ModuleRep, skip_projective: bool = True):
        if M.dim == 0:
            return []
        d = mr.decompose(M, self.seed)
        return [X for X, _ in d.classes if not (skip_projective and mr.is_projective(X))]

    def __len__(self):
        return len(self.items)


def _rank_int(rows, width):
    if not rows or width == 0:
        return 0
    return sympy.Matrix([[Fraction(r.get(j, 0)) for j in range(width)] for r in rows]).rank()


@dataclass
class PhiPsiResult:
    phi: DimensionAnswer
    psi: DimensionAnswer
    ranks: list
    catalogue: list
    generators: int
    notes: list = field(default_factory=list)

    def as_json(self):
        return {"phi": self.phi.as_json(), "psi": self.psi.as_json(), "ranks": self.ranks,
                "catalogue_dims": [list(X.dims) for X in self.catalogue], "notes": self.notes}


def phi_psi(generators, cutoff: int = 8, pd_cutoff: int | None = None, seed: int = 0) -> PhiPsiResult:
    """The Igusa-Todorov functions of M = sum of the generators, on a window of syzygies.

    The rank r_i is the rank of the classes of Omega^i(X) for the
    non-projective indecomposable summands X of the generators.
    """
    gens = [G for G in generators]
    if not gens:
        raise ValueError("phi_psi needs at least one generator")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    A = gens[0].A
    pd_cutoff = cutoff if pd_cutoff is None else pd_cutoff
    cat = Catalogue(seed)
    base = []
    for G in gens:
        for X in cat.pieces(G):
            if cat.index(X, add=False) is None or all(cat.index(X, add=False) != cat.index(Y, add=False) for Y in base):
                base.append(X)
    # unique summands
    uniq = []
    seen = set()
    for X in base:
        i = cat.index(X)
        if i not in seen:
            seen.add(i)
            uniq.append(X)
    notes = []
    ranks = []
    try:
        for i in range(cutoff + 1):
            rows = [cat.vector(ho.syzygy(X, i)) for X in uniq]
            ranks.append(_rank_int(rows, len(cat)))
    except ResourceError as e:
        notes.append(f"syzygy window stopped: {e}")
    phi = DimensionAnswer(None, len(ranks))
    for i in range(len(ranks) - 1):
        if all(ranks[j] == ranks[i] for j in range(i, len(ranks))):
            phi = DimensionAnswer(i)
            break
    if phi.known and len(ranks) < cutoff + 1:
        notes.append("stability only observed on the shortened window")
    if any(ranks[j] > ranks[j - 1] for j in range(1, len(ranks))):
        raise InvariantViolation("phi_psi: rank sequence increased")
    psi = DimensionAnswer(None)
    if phi.known:
        si = ho.selfinj_dims(A, pd_cutoff)
        best = 0
        unknown = False
        for G in gens:
            for Y in cat.pieces(ho.syzygy(G, phi.value)):
                if si.s == 0:
                    continue  # non-projective over a self-injective algebra: infinite pd
                d = ho.pd(Y, pd_cutoff)
                if d.known:
                    best = max(best, d.value)
                else:
                    unknown = True
        psi = DimensionAnswer(None, phi.value) if unknown else DimensionAnswer(phi.value + best)
    return PhiPsiResult(phi, psi, ranks, list(cat.items), len(gens), notes)


# ---------------------------------------------------------------------------
# syzygy-finiteness certificates

@dataclass
class SyzygyFinCertificate:
    kind: str  # monomial-ZH | finite-gldim | closure
    n: int
    catalogue: list
    transcript: list

    def verify(self, seed: int = 1) -> bool:
        """Re-check Omega-closure of the catalogue (up to add and projectives)."""
        cat = Catalogue(seed)
        for X in self.catalogue:
            cat.items.append(X)
        for X in self.catalogue:
            for Y in Catalogue(seed).pieces(ho.syzygy(X, 1)):
                if cat.index(Y, add=False) is None:
                    return False
        return True

    def as_json(self):
        return {"kind": self.kind, "n": self.n, "catalogue_dims": [list(X.dims) for X in self.catalogue],
                "transcript": self.transcript}


@dataclass
class Evidence:
    reason: str
    trace: list

    def as_json(self):
        return {"kind": "evidence", "reason": self.reason, "trace": self.trace}


@dataclass
class CertificateResult:
    certificates: list
    evidence: list

    @property
    def primary(self):
        return self.certificates[0] if self.certificates else None

    @property
    def certified(self):
        return bool(self.certificates)

    def kinds(self):
        return [c.kind for c in self.certificates]

    def get(self, kind):
        return next((c for c in self.certificates if c.kind == kind), None)

    def as_json(self):
        return {"certificates": [c.as_json() for c in self.certificates],
                "evidence": [e.as_json() for e in self.evidence]}


def _closed(cat: Catalogue, members, transcript):
    for X in members:
        for Y in cat.pieces(ho.syzygy(X, 1)):
            if cat.index(Y, add=False) is None:
                transcript.append(f"Omega of a member of dims {list(X.dims)} has a new summand {list(Y.dims)}")
                return False
    return True


def _route_gldim(A, depth):
    pds = [ho.pd(mr.standard_module(A, "simple", v), depth) for v in range(A.nv)]
    if all(d.known for d in pds):
        n = max(d.value for d in pds)
        return SyzygyFinCertificate("finite-gldim", n, [],
                                    [f"pd S({A.vertices[v]}) = {d.value}" for v, d in enumerate(pds)]
                                    + [f"global dimension {n}: Omega^{n} of every module is projective"]), None
    return None, Evidence("some simple has pd beyond the depth", [f"pd S({A.vertices[v]}) = {d}" for v, d in enumerate(pds)])


def _route_monomial(A, seed):
    pres = A.presentation
    if pres is None or any(len(rel) != 1 for rel in pres.relations):
        return None, Evidence("not a monomial presentation", [])
    cat = Catalogue(seed)
    transcript = []
    normal = getattr(A, "normal_paths", None)
    for b in range(A.dim):
        s, t = int(A.src[b]), int(A.tgt[b])
        P = mr.standard_module(A, "projective", s)
        blk = A.block(t, s)
        x = la.zeros(len(blk), 1)
        x[blk.index(b), 0] = 1
        # coordinates of b inside P(s)_t: P(s) is a single summand, so the block order applies
        C, _ = mr.submodule(P, mr.generated_bases(P, [(t, x.reshape(-1))]))
        for X in cat.pieces(C):
            cat.index(X)
        transcript.append(f"A*{A.labels[b]}: dims {list(C.dims)}")
    for v in range(A.nv):
        O2 = ho.syzygy(mr.standard_module(A, "simple", v), 2)
        for X in cat.pieces(O2):
            cat.index(X)
        transcript.append(f"Omega^2 S({A.vertices[v]}): dims {list(O2.dims)}")
    if not _closed(cat, list(cat.items), transcript):
        return None, Evidence("cyclic path modules not closed under Omega", transcript)
    transcript.append(f"catalogue of {len(cat)} non-projective indecomposables is Omega-closed")
    return SyzygyFinCertificate("monomial-ZH", 2, list(cat.items), transcript), None


def _route_closure(A, depth, seed, max_rounds=12, max_catalogue=200):
    transcript = []
    if A.loewy_length > 2:
        return None, Evidence("closure route is only sound for radical square zero (Omega lands in "
                              "semisimple modules); Loewy length is "
                              f"{A.loewy_length}", transcript)
    cat = Catalogue(seed)
    frontier = []
    for v in range(A.nv):
        O = ho.syzygy(mr.standard_module(A, "simple", v), depth)
        for X in cat.pieces(O):
            if cat.index(X, add=False) is None:
                cat.index(X)
                frontier.append(X)
    transcript.append(f"start: {len(cat)} indecomposables from Omega^{depth} of the simples")
    for r in range(max_rounds):
        new = []
        for X in frontier:
            for Y in cat.pieces(ho.syzygy(X, 1)):
                if cat.index(Y, add=False) is None:
                    cat.index(Y)
                    new.append(Y)
        transcript.append(f"round {r + 1}: {len(new)} new, catalogue {len(cat)}")
        if not new:
            return SyzygyFinCertificate("closure", depth + 1, list(cat.items), transcript), None
        if len(cat) > max_catalogue:
            break
        frontier = new
    return None, Evidence("catalogue did not stabilize within the budget", transcript)


def certify_syzygy_finite(A: BasedAlgebra, depth: int = 8, seed: int = 0, routes=None) -> CertificateResult:
    """Try the finite-gldim, monomial and closure routes in that order.

    Every successful route is returned (the first is primary); failed routes
    leave Evidence, never a claim.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    routes = routes or ("finite-gldim", "monomial-ZH", "closure")
    certs, ev = [], []
    for r in routes:
        try:
            if r == "finite-gldim":
                c, e = _route_gldim(A, depth)
            elif r == "monomial-ZH":
                c, e = _route_monomial(A, seed)
            elif r == "closure":
                c, e = _route_closure(A, depth, seed)
            else:
                raise ValueError(f"unknown route {r}")
        except ResourceError as err:
            c, e = None, Evidence(f"route {r} ran out of budget: {err}", [])
        if c is not None:
            if not c.verify(seed + 1):
                raise InvariantViolation(f"certificate {c.kind} failed re-verification")
            certs.append(c)
        elif e is not None:
            e.reason = f"{r}: {e.reason}"
            ev.append(e)
    return CertificateResult(certs, ev)


# ---------------------------------------------------------------------------
# weak resolution witnesses

def _add_classes(G: ModuleRep, seed=0):
    return [X for X, _ in mr.decompose(G, seed).classes]


def in_add(X: ModuleRep, classes, seed=0) -> bool:
    if X.dim == 0:
        return True
    for Y, _ in mr.decompose(X, seed).classes:
        if not any(mr.fingerprint(Y) == mr.fingerprint(Z) and mr.iso_indecomposable(Z, Y) is not None
                   for Z in classes):
            return False
    return True


def minimal_right_approximation(X: ModuleRep, classes):
    """(G, f): f: G -> X a minimal right add(classes)-approximation."""
    A = X.A
    p = A.p
    pieces, maps = [], []
    for i, Gi in enumerate(classes):
        H = mr.hom_basis(Gi, X)
        if not H:
            continue
        # radical part: maps G_i -> G_j -> X with G_i -> G_j non-invertible
        rad_flat = []
        for j, Gj in enumerate(classes):
            HjX = mr.hom_basis(Gj, X)
            if not HjX:
                continue
            Hij = mr.hom_basis(Gi, Gj)
            if i == j:
                E = [f.total() for f in Hij]
                J = mr._end_radical(E, p) if E else la.zeros(0, 0)
                Hij = [mr.from_total(Gi, Gi, np.tensordot(J[:, c], np.stack(E), axes=1) % p)
                       for c in range(J.shape[1])]
            for g in Hij:
                for h in HjX:
                    rad_flat.append(mr.compose(h, g).total().reshape(-1))
        Hf = np.stack([f.total().reshape(-1) for f in H], axis=1)
        R = np.stack(rad_flat, axis=1) if rad_flat else la.zeros(Hf.shape[0], 0)
        R = la.colspace(R, p) if R.shape[1] else R
        for c in la.extend_basis(R, Hf, p):
            pieces.append(Gi)
            maps.append(H[c])
    if not pieces:
        return mr.zero_module(A), mr.zero_map(mr.zero_module(A), X)
    S, inj, proj = mr.direct_sum(pieces)
    f = mr.zero_map(S, X)
    for g, pr in zip(maps, proj):
        f = f + mr.compose(g, pr)
    return S, f


@dataclass
class WrdWitness:
    target: ModuleRep
    terms: list  # U_0, U_1, ..., U_m
    maps: list  # maps[0]: U_0 -> X, maps[i]: U_i -> U_{i-1}
    found: bool
    reason: str = ""

    @property
    def length(self):
        return len(self.terms) - 1 if self.found else None

    def verify(self, classes, seed=0) -> bool:
        if not self.found:
            return False
        # exactness of 0 -> U_m -> ... -> U_0 -> X -> 0
        fs = self.maps
        if fs[0].rank() != self.target.dim:
            return False
        for i in range(1, len(fs)):
            if not mr.compose(fs[i - 1], fs[i]).is_zero():
                return False
            ker_prev = fs[i - 1].dom.dim - fs[i - 1].rank()
            if fs[i].rank() != ker_prev:
                return False
        last = fs[-1]
        if last.rank() != last.dom.dim:
            return False
        return all(in_add(U, classes, seed) for U in self.terms)


def wrd_search(U: ModuleRep, targets, maxlen: int = 4, seed: int = 0):
    """A weak add(U + A)-resolution of each target, when one is found within maxlen."""
    A = U.A
    G = mr.direct_sum([U, ho.regular_module(A)])[0]
    classes = _add_classes(G, seed)
    out = []
    for X in targets:
        out.append(_wrd_one(X, classes, maxlen, seed))
    return out, classes


def _wrd_one(X, classes, maxlen, seed):
    if in_add(X, classes, seed):
        idm = mr.identity(X)
        return WrdWitness(X, [X], [idm], True, "target lies in add")
    terms, maps = [], []
    cur = X
    for step in range(maxlen + 1):
        S, f = minimal_right_approximation(cur, classes)
        if f.rank() != cur.dim:
            return WrdWitness(X, terms, maps, False, "U does not generate X" if step == 0 else
                              "approximation not surjective")
        if step == 0:
            maps.append(f)
        else:
            maps.append(mr.compose(incl, f))
        terms.append(S)
        (K, kin), _, _ = mr.map_spaces(f)
        if K.dim == 0:
            return WrdWitness(X, terms, maps, True)
        if in_add(K, classes, seed):
            terms.append(K)
            maps.append(kin)
            return WrdWitness(X, terms, maps, True)
        cur, incl = K, kin
    return WrdWitness(X, terms, maps, False, f"no certificate found within length {maxlen}")


# ---------------------------------------------------------------------------
# the report

@dataclass
class ITReport:
    data: dict

    def as_json(self):
        return self.data

    def text(self) -> str:
        d = self.data
        lines = [f"algebra {d['algebra']['name']}: dim {d['algebra']['dim']}, "
                 f"{d['algebra']['simples']} simples, Loewy length {d['loewy']}"]
        for r in d["bounds"]:
            lines.append(f"  V = {{{', '.join(r['V'])}}}: layer length {r['layer_length']}, bound {r['bound']}")
        lines.append(f"upper bound: IT.dist(A) <= {d['upper']} (V = {{{', '.join(d['best_V'])}}})")
        for c in d["certificates"]["certificates"]:
            lines.append(f"certificate {c['kind']}: {c['n']}-syzygy-finite")
        lines.append(f"gorenstein: {d['gorenstein']['verdict']}")
        for note in d["notes"]:
            lines.append(f"note: {note}")
        for a in d["external_assertions"]:
            lines.append(f"external-assertion: {a}")
        lines.append(d["verdict"])
        lines.append(d["inequality"])
        if d.get("reference"):
            lines.append(f"reference: {d['reference']}")
        return "\n".join(lines) + "\n"


KNOWN_ASSERTIONS = {"not-syzygy-finite"}


def it_report(A: BasedAlgebra, pd_cutoff: int = ho.DEFAULT_CUTOFF, depth: int = 8, phi_cutoff: int = 4,
              seed: int = 0, external_assertions=(), reference: str | None = None,
              subset_budget: int = SUBSET_CAP_BITS) -> ITReport:
    for a in external_assertions:
        if a not in KNOWN_ASSERTIONS:
            raise ValueError(f"unknown external assertion {a!r}")
    ub = it_upper_bound(A, pd_cutoff, subset_budget)
    certs = certify_syzygy_finite(A, depth, seed)
    si = ho.selfinj_dims(A, pd_cutoff)
    notes = []
    try:
        pp = phi_psi([mr.standard_module(A, "simple", v) for v in range(A.nv)], phi_cutoff, pd_cutoff, seed)
        ppj = pp.as_json()
    except ResourceError as e:
        ppj = {"phi": {"unknown_at_least": 0}, "psi": {"unknown_at_least": 0}, "notes": [str(e)]}
    if si.s is not None:
        notes.append(f"A is {si.verdict}: IT.dist(A) = w.resol.dim(A-Gproj)")
    lower = 0
    if "not-syzygy-finite" in external_assertions:
        if certs.certified:
            raise InvariantViolation("external assertion 'not-syzygy-finite' contradicts a certificate")
        lower = 1
    upper = ub.bound
    if certs.certified:
        upper = 0
        verdict = "IT.dist = 0 (certified)"
    elif lower == upper:
        verdict = f"IT.dist(A)={upper}"
    else:
        verdict = f"IT.dist(A) in [{lower}, {upper}]"
    if ub.bound > 0 and certs.certified:
        notes.append(f"layer-length bound {ub.bound} superseded by the certificate")
    if not ub.exhaustive:
        notes.append("non-exhaustive over V")
    fp = algebra_fingerprint(A)
    data = {
        "algebra": {"name": A.name, **fp.as_dict()},
        "loewy": A.loewy_length,
        "bounds": [r.as_json() for r in ub.table],
        "best_V": list(ub.best_V),
        "upper": upper,
        "lower": lower,
        "layer_length_bound": ub.bound,
        "finite_pd_simples": {v: d.as_json() for v, d in ub.finite_pd.items()},
        "certificates": certs.as_json(),
        "phi_psi": ppj,
        "gorenstein": si.as_json(),
        "verdict": verdict,
        "inequality": f"dim D_sg(A) <= {upper}",
        "external_assertions": list(external_assertions),
        "reference": reference,
        "notes": notes,
        "composition_convention": A.composition,
        "p": A.p,
        "seed": seed,
        "cutoffs": {"pd": pd_cutoff, "depth": depth, "phi": phi_cutoff, "subset_bits": subset_budget},
        "version": __version__,
    }
    return ITReport(data)
