"""Quiver presentations kQ/I and their completion to a rewriting system.

Internally a path is a tuple of arrow indices written function-style:
``(a1, a2, ..., ak)`` means a1 after a2 after ... after ak, so ak is
traversed first.  Concatenation of tuples is the algebra product.  The
``composition`` setting only affects how relation text is read and how
labels are printed.

Polynomials are dicts ``{path: coefficient mod p}``; every term of a
polynomial is a path of length >= 1 (trivial paths never occur in the
ideal because relations live in J^2).
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import NonAdmissible, ParseError, ResourceError
from .linalg import is_prime

DEFAULT_P = 101


@dataclass(frozen=True)
class Arrow:
    label: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple

    def __post_init__(self):
        if not self.vertices:
            raise ParseError("a quiver needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ParseError("duplicate vertex")
        labels = [a.label for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise ParseError("duplicate arrow label")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.source not in vs or a.target not in vs:
                raise ParseError(f"arrow {a.label} uses an undeclared vertex")

    @property
    def vindex(self):
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def aindex(self):
        return {a.label: i for i, a in enumerate(self.arrows)}

    def src(self, k: int) -> int:
        return self.vertices.index(self.arrows[k].source)

    def tgt(self, k: int) -> int:
        return self.vertices.index(self.arrows[k].target)


@dataclass(frozen=True)
class AlgebraPresentation:
    quiver: Quiver
    relations: tuple  # tuple of tuples ((coeff, path), ...)
    nilpotency: int
    p: int = DEFAULT_P
    composition: str = "function"
    name: str = "A"
    power_relation: int | None = None  # "relation J^m": all paths of length m lie in I

    def __post_init__(self):
        if self.nilpotency < 2:
            raise ParseError("nilpotency degree must be at least 2")
        if not is_prime(self.p):
            raise ParseError(f"field characteristic {self.p} is not prime")
        if self.composition not in ("function", "diagrammatic"):
            raise ParseError(f"unknown composition convention {self.composition!r}")

    def path_source(self, w):
        return self.quiver.src(w[-1])

    def path_target(self, w):
        return self.quiver.tgt(w[0])

    def word_label(self, w) -> str:
        if not w:
            return "e"
        labs = [self.quiver.arrows[k].label for k in w]
        if self.composition == "diagrammatic":
            labs = labs[::-1]
        return "*".join(labs)

    def is_monomial(self) -> bool:
        return all(len(r) == 1 for r in self.relations)

    @property
    def src_table(self):
        return tuple(self.quiver.src(k) for k in range(len(self.quiver.arrows)))

    @property
    def tgt_table(self):
        return tuple(self.quiver.tgt(k) for k in range(len(self.quiver.arrows)))


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\S))")


def _tokens(s, lineno, offset):
    pos = 0
    out = []
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            break
        col = offset + m.start(m.lastindex) + 1
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), col))
        elif m.group(2) is not None:
            out.append(("id", m.group(2), col))
        else:
            out.append(("sym", m.group(3), col))
        pos = m.end()
    return out


def _parse_expr(text, lineno, offset, quiver, composition, p, source):
    """Parse a relation expression into a polynomial dict."""
    toks = _tokens(text, lineno, offset)
    if not toks:
        raise ParseError("empty relation", lineno, offset + 1, source)
    aidx = quiver.aindex
    poly = {}
    i = 0
    first = True

    def err(msg, col):
        raise ParseError(msg, lineno, col, source)

    while i < len(toks):
        sign = 1
        if toks[i][0] == "sym" and toks[i][1] in "+-":
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        elif not first:
            err("expected '+' or '-'", toks[i][2])
        first = False
        if i >= len(toks):
            err("dangling sign", toks[-1][2])
        coeff = 1
        start_col = toks[i][2]
        if toks[i][0] == "int":
            coeff = toks[i][1]
            i += 1
            if i < len(toks) and toks[i][0] == "sym" and toks[i][1] == "*":
                i += 1
        labels = []
        while True:
            if i >= len(toks) or toks[i][0] != "id":
                col = toks[i][2] if i < len(toks) else start_col
                err("expected an arrow label", col)
            lab, col = toks[i][1], toks[i][2]
            if lab not in aidx:
                err(f"unknown arrow {lab!r}", col)
            i += 1
            power = 1
            if i < len(toks) and toks[i][0] == "sym" and toks[i][1] == "^":
                if i + 1 >= len(toks) or toks[i + 1][0] != "int":
                    err("expected an exponent", toks[i][2])
                power = toks[i + 1][1]
                i += 2
            labels.extend([lab] * power)
            if i < len(toks) and toks[i][0] == "sym" and toks[i][1] == "*":
                i += 1
                continue
            break
        word = [aidx[l] for l in labels]
        if composition == "diagrammatic":
            word = word[::-1]
        word = tuple(word)
        for a, b in zip(word, word[1:]):
            if quiver.src(a) != quiver.tgt(b):
                err(f"arrows do not compose in term starting here "
                    f"({composition} convention)", start_col)
        if len(word) < 2:
            err("relation term of length < 2 (ideal must lie in J^2)", start_col)
        c = (sign * coeff) % p
        if c:
            poly[word] = (poly.get(word, 0) + c) % p
            if poly[word] == 0:
                del poly[word]
    if poly:
        ends = {(quiver.src(w[-1]), quiver.tgt(w[0])) for w in poly}
        if len(ends) > 1:
            raise ParseError("non-parallel terms in relation", lineno, offset + 1, source)
    return poly


def parse_presentation(text: str, source: str | None = None,
                       composition: str | None = None, p: int | None = None,
                       name: str | None = None) -> AlgebraPresentation:
    """Parse the line-oriented presentation format.

    ``composition`` and ``p`` given here override the file.
    """
    vertices = None
    arrows = []
    rel_lines = []
    nil = None
    field_p = None
    comp = None
    pname = None
    power_rel = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        kw, _, rest = stripped.partition(" ")
        rest_off = indent + len(kw) + 1
        if kw == "field":
            m = re.fullmatch(r"\s*(?:p\s*=\s*)?(\d+)\s*", rest)
            if not m:
                raise ParseError("expected 'field p=<prime>'", lineno, rest_off + 1, source)
            field_p = int(m.group(1))
        elif kw == "composition":
            comp = rest.strip()
            if comp not in ("function", "diagrammatic"):
                raise ParseError(f"unknown composition {comp!r}", lineno, rest_off + 1, source)
        elif kw == "name":
            pname = rest.strip()
        elif kw == "vertices":
            vertices = tuple(rest.split())
            if not vertices:
                raise ParseError("no vertices given", lineno, rest_off, source)
        elif kw == "arrow":
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(\S+)\s*->\s*(\S+)\s*", rest)
            if not m:
                raise ParseError("expected 'arrow <label>: <v> -> <w>'", lineno, rest_off + 1, source)
            arrows.append((m.group(1), m.group(2), m.group(3), lineno))
        elif kw == "relation":
            m = re.fullmatch(r"\s*J\s*\^\s*(\d+)\s*", rest)
            if m:
                power = int(m.group(1))
                if power < 2:
                    raise ParseError("J^m relation needs m >= 2", lineno, rest_off + 1, source)
                power_rel = power if power_rel is None else min(power_rel, power)
            else:
                rel_lines.append((rest, lineno, rest_off))
        elif kw == "nilpotency":
            m = re.fullmatch(r"\s*(\d+)\s*", rest)
            if not m:
                raise ParseError("expected 'nilpotency <N>'", lineno, rest_off + 1, source)
            nil = int(m.group(1))
        else:
            raise ParseError(f"unknown keyword {kw!r}", lineno, indent + 1, source)
    if vertices is None:
        raise ParseError("missing 'vertices' line", None, None, source)
    if nil is None:
        raise ParseError("missing 'nilpotency' line", None, None, source)
    vs = set(vertices)
    for lab, s, t, lineno in arrows:
        for v in (s, t):
            if v not in vs:
                raise ParseError(f"unknown vertex {v!r} in arrow {lab}", lineno, None, source)
    quiver = Quiver(vertices, tuple(Arrow(l, s, t) for l, s, t, _ in arrows))
    comp = composition or comp or "function"
    pp = p or field_p or DEFAULT_P
    if not is_prime(pp):
        raise ParseError(f"field characteristic {pp} is not prime", None, None, source)
    rels = []
    for txt, lineno, off in rel_lines:
        poly = _parse_expr(txt, lineno, off, quiver, comp, pp, source)
        if poly:
            rels.append(tuple(sorted((c, w) for w, c in poly.items())))
    if name is None:
        name = pname or (Path(source).stem if source else "A")
    return AlgebraPresentation(quiver, tuple(rels), nil, pp, comp, name, power_rel)


def load_presentation(path, **kw) -> AlgebraPresentation:
    path = Path(path)
    return parse_presentation(path.read_text(encoding="utf-8"), source=str(path), **kw)


def presentation_text(pres: AlgebraPresentation) -> str:
    """Serialize back to the text format (round-trips through the parser)."""
    lines = [f"name {pres.name}", f"field p={pres.p}", f"composition {pres.composition}",
             "vertices " + " ".join(pres.quiver.vertices)]
    for a in pres.quiver.arrows:
        lines.append(f"arrow {a.label}: {a.source} -> {a.target}")
    for rel in pres.relations:
        parts = []
        for c, w in rel:
            parts.append(f"+ {c}*{pres.word_label(w)}")
        lines.append("relation " + " ".join(parts).lstrip("+ "))
    if pres.power_relation is not None:
        lines.append(f"relation J^{pres.power_relation}")
    lines.append(f"nilpotency {pres.nilpotency}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# rewriting

def _key(w):
    return (len(w), w)


def _lm(f):
    return max(f, key=_key)


def _add_into(dst, src, scale, p, N, left=(), right=()):
    for w, c in src.items():
        ww = left + w + right
        if len(ww) >= N:
            continue
        v = (dst.get(ww, 0) + scale * c) % p
        if v:
            dst[ww] = v
        else:
            dst.pop(ww, None)


class ReductionSystem:
    """Rules ``lm -> tail`` plus "every path of length >= N is zero".

    ``rules`` maps a leading path to its tail polynomial, so that
    lm = tail holds in the algebra.
    """

    def __init__(self, pres: AlgebraPresentation, rules: dict, N: int):
        self.pres = pres
        self.p = pres.p
        self.N = N
        self.rules = dict(rules)
        self.lengths = sorted({len(w) for w in self.rules})
        self._cache = {}

    def find(self, w, rightmost=False):
        positions = range(len(w) - 1, -1, -1) if rightmost else range(len(w))
        for i in positions:
            for L in self.lengths:
                if i + L > len(w):
                    break
                if w[i:i + L] in self.rules:
                    return i, L
        return None

    def is_normal(self, w) -> bool:
        return len(w) < self.N and self.find(w) is None

    def reduce_word(self, w, rightmost=False) -> dict:
        if len(w) >= self.N:
            return {}
        key = (w, rightmost)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        loc = self.find(w, rightmost)
        if loc is None:
            out = {w: 1}
        else:
            i, L = loc
            out = {}
            pre, post = w[:i], w[i + L:]
            for t, c in self.rules[w[i:i + L]].items():
                sub = self.reduce_word(pre + t + post, rightmost)
                for u, d in sub.items():
                    v = (out.get(u, 0) + c * d) % self.p
                    if v:
                        out[u] = v
                    else:
                        out.pop(u, None)
        self._cache[key] = out
        return out

    def normal_form(self, poly: dict, rightmost=False) -> dict:
        out = {}
        for w, c in poly.items():
            if not w:
                if c % self.p:
                    out[w] = (out.get(w, 0) + c) % self.p
                continue
            for u, d in self.reduce_word(tuple(w), rightmost).items():
                v = (out.get(u, 0) + c * d) % self.p
                if v:
                    out[u] = v
                else:
                    out.pop(u, None)
        return out

    def normal_words(self):
        """All normal paths of length >= 1, by breadth-first left extension."""
        q = self.pres.quiver
        narr = len(q.arrows)
        src = self.pres.src_table
        tgt = self.pres.tgt_table
        level = [(k,) for k in range(narr) if (k,) not in self.rules]
        out = list(level)
        while level:
            nxt = []
            for w in level:
                if len(w) + 1 >= self.N:
                    continue
                t = tgt[w[0]]
                for a in range(narr):
                    if src[a] != t:
                        continue
                    nw = (a,) + w
                    if any(nw[:L] in self.rules for L in self.lengths if L <= len(nw)):
                        continue
                    nxt.append(nw)
            out.extend(nxt)
            level = nxt
        out.sort(key=_key)
        return out


def _paths_by_length(pres, maxlen):
    q = pres.quiver
    narr = len(q.arrows)
    src, tgt = pres.src_table, pres.tgt_table
    layers = [[()]]
    cur = [(a,) for a in range(narr)]
    for _ in range(maxlen):
        layers.append(cur)
        cur = [(a,) + w for w in cur for a in range(narr) if src[a] == tgt[w[0]]]
    return layers


def complete_rewriting(pres: AlgebraPresentation, N: int | None = None,
                       term_budget: int = 2_000_000) -> ReductionSystem:
    """Truncated noncommutative Buchberger completion.

    Works modulo paths of length >= N (default: the declared nilpotency
    degree).  Raises ResourceError if more than ``term_budget`` polynomial
    terms are processed in total.
    """
    p = pres.p
    N = pres.nilpotency if N is None else N
    if pres.power_relation is not None:
        N = min(N, pres.power_relation)
    G = {}  # lm -> monic polynomial (full, lm included)
    heap = []
    counter = [0, 0]
    paths = None

    def push(f):
        if f:
            counter[1] += 1
            heapq.heappush(heap, (max(len(w) for w in f), counter[1], f))

    def reduce(f):
        f = {w: c for w, c in f.items() if len(w) < N}
        out = {}
        while f:
            w = _lm(f)
            c = f.pop(w)
            counter[0] += 1
            if counter[0] > term_budget:
                raise ResourceError(
                    f"rewriting completion exceeded the term budget ({term_budget})")
            hit = None
            for i in range(len(w)):
                for L in lengths_sorted():
                    if i + L > len(w):
                        break
                    g = G.get(w[i:i + L])
                    if g is not None:
                        hit = (i, L, g)
                        break
                if hit:
                    break
            if hit is None:
                out[w] = c
                continue
            i, L, g = hit
            lmw = w[i:i + L]
            pre, post = w[:i], w[i + L:]
            for t, d in g.items():
                if t == lmw:
                    continue
                tt = pre + t + post
                if len(tt) >= N:
                    continue
                v = (f.get(tt, 0) - c * d) % p
                if v:
                    f[tt] = v
                else:
                    f.pop(tt, None)
        return out

    length_cache = [None]

    def lengths_sorted():
        if length_cache[0] is None:
            length_cache[0] = sorted({len(w) for w in G})
        return length_cache[0]

    def monic(f):
        w = _lm(f)
        inv = pow(f[w], p - 2, p)
        return {u: (c * inv) % p for u, c in f.items()}

    def homogeneous(f):
        return len({len(w) for w in f}) == 1

    def spolys(f, g):
        a, b = _lm(f), _lm(g)
        # suffix of a overlapping a prefix of b: a = u v, b = v w
        for k in range(1, min(len(a), len(b))):
            if a[-k:] == b[:k]:
                u, w = a[:-k], b[k:]
                if len(u) + len(b) >= N and homogeneous(f) and homogeneous(g):
                    continue
                s = {}
                _add_into(s, f, 1, p, N, right=w)
                _add_into(s, g, -1, p, N, left=u)
                push(s)

    def obstruction_compositions(f):
        nonlocal paths
        lm = _lm(f)
        mn = min(len(w) for w in f)
        if paths is None:
            paths = _paths_by_length(pres, N)
        tgt_f = pres.path_target(lm)
        src_f = pres.path_source(lm)
        for wl in range(max(1, N - len(lm)), N - mn):
            for w in paths[wl]:
                if pres.path_target(w) == src_f:
                    s = {}
                    _add_into(s, f, 1, p, N, right=w)
                    push(s)
                if pres.path_source(w) == tgt_f:
                    s = {}
                    _add_into(s, f, 1, p, N, left=w)
                    push(s)
        tot = N - len(lm)
        for xl in range(1, tot):
            wl = tot - xl
            if xl + mn + wl >= N:
                continue
            for x in paths[xl]:
                if pres.path_source(x) != tgt_f:
                    continue
                for w in paths[wl]:
                    if pres.path_target(w) == src_f:
                        s = {}
                        _add_into(s, f, 1, p, N, left=x, right=w)
                        push(s)

    for rel in pres.relations:
        push({w: c % p for c, w in rel})

    while heap:
        _, _, f = heapq.heappop(heap)
        f = reduce(f)
        if not f:
            continue
        f = monic(f)
        lm = _lm(f)
        for other in list(G):
            if any(other[i:i + len(lm)] == lm for i in range(len(other) - len(lm) + 1)):
                push(G.pop(other))
        G[lm] = f
        length_cache[0] = None
        for g in list(G.values()):
            spolys(f, g)
            if g is not f:
                spolys(g, f)
        if not homogeneous(f):
            obstruction_compositions(f)

    # inter-reduce tails
    rules = {}
    for lm, f in G.items():
        tail = {w: (-c) % p for w, c in f.items() if w != lm}
        rules[lm] = tail
    rs = ReductionSystem(pres, rules, N)
    final = {}
    for lm, tail in rules.items():
        final[lm] = rs.normal_form(tail)
    return ReductionSystem(pres, final, N)


def normal_form(element: dict, rs: ReductionSystem) -> dict:
    """Unique normal form of a linear combination of paths."""
    return rs.normal_form(element)


def check_admissible(pres: AlgebraPresentation, term_budget: int = 2_000_000):
    """Verify J^N is contained in the ideal.

    Completes modulo paths of length N+1 and checks that every path of
    length N then has normal form zero.  Returns the (N+1)-truncated
    system on success, raises NonAdmissible with a witness path otherwise.
    """
    N = pres.nilpotency
    rs = complete_rewriting(pres, N + 1, term_budget)
    homog = all(len({len(w) for _, w in rel}) == 1 for rel in pres.relations)
    if homog:
        suspects = [w for w in rs.normal_words() if len(w) == N]
    else:
        suspects = [w for w in _paths_by_length(pres, N)[N] if rs.reduce_word(w)]
    if suspects:
        w = suspects[0]
        raise NonAdmissible(
            f"path {pres.word_label(w)} of length {N} has nonzero normal form; "
            f"J^{N} is not contained in the ideal")
    return rs
