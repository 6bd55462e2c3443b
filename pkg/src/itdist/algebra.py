"""Based algebras: exact structure constants on a chosen basis.

Conventions.  The basis element ``b`` lives in ``e_t A e_s`` with
``t = tgt[b]`` and ``s = src[b]``; for a path, s is where it starts and t
where it ends.  The product ``x * y`` means "y first, then x", so
``b * c`` can only be nonzero when ``src[b] == tgt[c]``.  With this rule a
left module is a vertex-graded space with arrow matrices M_v -> M_w, and
rho(x * y) = rho(x) @ rho(y).

``table[i, j, :]`` holds the coordinates of ``basis_i * basis_j``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import linalg as la
from .errors import InvariantViolation, ResourceError
from .presentation import AlgebraPresentation, check_admissible


class BasedAlgebra:
    """A finite-dimensional basic algebra over F_p with explicit basis.

    The basis consists of the primitive idempotents (one per vertex)
    followed by a basis of the radical.  ``words[b]`` expresses the
    basis element ``b`` in the chosen arrows, as a list of
    (coefficient, tuple of arrow positions) with function-style words.
    """

    def __init__(self, p, vertices, labels, src, tgt, table, idem, degree=None,
                 arrows=None, words=None, name="A", presentation=None,
                 composition="function", arrow_labels=None):
        self.p = int(p)
        self.vertices = tuple(vertices)
        self.labels = tuple(labels)
        self.src = np.asarray(src, dtype=np.int64)
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.table = np.asarray(table, dtype=np.int64) % self.p
        self.idem = tuple(int(i) for i in idem)
        self.name = name
        self.presentation = presentation
        self.composition = composition
        self._degree = None if degree is None else tuple(int(d) for d in degree)
        self._arrows = None if arrows is None else tuple(int(a) for a in arrows)
        self._words = words
        self._arrow_labels = arrow_labels
        self._op = None
        n = len(self.labels)
        if self.table.shape != (n, n, n):
            raise InvariantViolation(f"{name}: structure table has shape {self.table.shape}")
        if len(self.idem) != len(self.vertices):
            raise InvariantViolation(f"{name}: one idempotent per vertex required")

    # -- basic data -------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def nv(self) -> int:
        return len(self.vertices)

    def vertex_index(self, v) -> int:
        """Integers are positions, strings are vertex names."""
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            if 0 <= int(v) < self.nv:
                return int(v)
            raise KeyError(f"vertex position {v} out of range for algebra {self.name}")
        if v not in self.vertices:
            raise KeyError(f"unknown vertex {v!r} of algebra {self.name}")
        return self.vertices.index(v)

    @cached_property
    def radical_indices(self):
        idem = set(self.idem)
        return tuple(i for i in range(self.dim) if i not in idem)

    def block(self, t: int, s: int):
        """Basis indices spanning e_t A e_s."""
        return self._blocks[(t, s)]

    @cached_property
    def _blocks(self):
        out = {(t, s): [] for t in range(self.nv) for s in range(self.nv)}
        for b in range(self.dim):
            out[(int(self.tgt[b]), int(self.src[b]))].append(b)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def by_source(self):
        """by_source[s][t] = basis indices of e_t A e_s (basis of P(s) at t)."""
        return tuple(tuple(self.block(t, s) for t in range(self.nv)) for s in range(self.nv))

    def cartan(self) -> np.ndarray:
        C = np.zeros((self.nv, self.nv), dtype=np.int64)
        for t in range(self.nv):
            for s in range(self.nv):
                C[t, s] = len(self.block(t, s))
        return C

    # -- arithmetic --------------------------------------------------------
    def unit(self, b: int) -> np.ndarray:
        x = np.zeros(self.dim, dtype=np.int64)
        x[b] = 1
        return x

    def mul(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        # (x^T T) then contract with y, mod p at each stage
        xt = la.matmul(x.reshape(1, -1), self.table.reshape(self.dim, -1), self.p)
        xt = xt.reshape(self.dim, self.dim)
        return la.matmul(y.reshape(1, -1), xt, self.p).reshape(-1)

    def lmat(self, x) -> np.ndarray:
        """Matrix of y -> x*y (columns indexed by basis of y)."""
        x = np.asarray(x, dtype=np.int64)
        m = la.matmul(x.reshape(1, -1), self.table.reshape(self.dim, -1), self.p)
        return m.reshape(self.dim, self.dim).T.copy()

    def rmat(self, x) -> np.ndarray:
        """Matrix of y -> y*x."""
        x = np.asarray(x, dtype=np.int64)
        T = self.table.transpose(0, 2, 1).reshape(-1, self.dim)
        m = la.matmul(T, x.reshape(-1, 1), self.p).reshape(self.dim, self.dim)
        return m.T.copy()

    @cached_property
    def left_basis_mats(self):
        return tuple(self.lmat(self.unit(b)) for b in range(self.dim))

    def inverse_local(self, x, v: int) -> np.ndarray:
        """Inverse in e_v A e_v of an element with invertible e_v-coefficient."""
        x = np.asarray(x, dtype=np.int64) % self.p
        e = self.idem[v]
        lam = int(x[e])
        if lam == 0:
            raise InvariantViolation("element is not invertible in the local corner")
        inv = pow(lam, self.p - 2, self.p)
        n = (x * inv) % self.p
        n[e] = (n[e] - 1) % self.p  # x/lam = e + n, n nilpotent
        out = self.unit(e)
        term = self.unit(e)
        negn = (-n) % self.p
        for _ in range(self.loewy_length + 1):
            term = self.mul(term, negn)
            if not term.any():
                break
            out = (out + term) % self.p
        return (out * inv) % self.p

    # -- radical filtration ------------------------------------------------
    @cached_property
    def radical_powers(self):
        """List of column-basis matrices of rad^k, k = 0, 1, ..., until zero."""
        n = self.dim
        out = [la.eye(n)]
        cur = la.eye(n)[:, list(self.radical_indices)]
        out.append(la.colspace(cur, self.p))
        rad_mats = [self.left_basis_mats[b] for b in self.radical_indices]
        while out[-1].shape[1] > 0:
            prev = out[-1]
            if not rad_mats:
                out.append(la.zeros(n, 0))
                break
            prods = np.concatenate([la.matmul(L, prev, self.p) for L in rad_mats], axis=1)
            nxt = la.colspace(prods, self.p)
            if nxt.shape[1] >= prev.shape[1]:
                raise InvariantViolation(f"{self.name}: radical is not nilpotent")
            out.append(nxt)
        return out

    @cached_property
    def loewy_length(self) -> int:
        pw = self.radical_powers
        return next(k for k, m in enumerate(pw) if m.shape[1] == 0)

    @property
    def layer_dims(self):
        pw = self.radical_powers
        return tuple(pw[k].shape[1] - pw[k + 1].shape[1] for k in range(self.loewy_length))

    @property
    def degree(self):
        if self._degree is None:
            pw = self.radical_powers
            deg = []
            for b in range(self.dim):
                k = 0
                while k + 1 < len(pw) and la.in_span(pw[k + 1], self.unit(b), self.p):
                    k += 1
                deg.append(k)
            self._degree = tuple(deg)
        return self._degree

    # -- arrows and words ----------------------------------------------------
    @property
    def arrows(self):
        if self._arrows is None:
            self._compute_words()
        return self._arrows

    @property
    def arrow_labels(self):
        if self._arrow_labels is None:
            return tuple(self.labels[a] for a in self.arrows)
        return self._arrow_labels

    @property
    def words(self):
        if self._words is None:
            self._compute_words()
        return self._words

    @cached_property
    def arrow_src(self):
        return tuple(int(self.src[a]) for a in self.arrows)

    @cached_property
    def arrow_tgt(self):
        return tuple(int(self.tgt[a]) for a in self.arrows)

    def _compute_words(self):
        """Choose arrows (a basis of rad/rad^2 made of basis elements) and
        express every radical basis element in arrow words."""
        p = self.p
        n = self.dim
        pw = self.radical_powers
        rad2 = pw[2] if len(pw) > 2 else la.zeros(n, 0)
        arrows = []
        for t in range(self.nv):
            for s in range(self.nv):
                blk = [b for b in self.block(t, s) if b not in self.idem]
                if not blk:
                    continue
                V = la.eye(n)[:, blk]
                R = rad2
                picked = la.extend_basis(R, V, p)
                arrows.extend(blk[i] for i in picked)
        arrows.sort()
        # breadth-first words
        kept_words = []
        kept_vecs = []
        level = [((k,), self.unit(a)) for k, a in enumerate(arrows)]
        target = len(self.radical_indices)
        srcs = [int(self.src[a]) for a in arrows]
        tgts = [int(self.tgt[a]) for a in arrows]
        span = la.zeros(n, 0)
        depth = 0
        while level and span.shape[1] < target:
            depth += 1
            if depth > n + 1:
                raise ResourceError(f"{self.name}: arrow words do not span the radical")
            nxt = []
            for w, vec in level:
                if not vec.any():
                    continue
                if not la.in_span(span, vec, p):
                    span = np.concatenate([span, vec.reshape(-1, 1)], axis=1)
                    kept_words.append(w)
                    kept_vecs.append(vec)
                for k, a in enumerate(arrows):
                    if srcs[k] == tgts[w[0]]:
                        nxt.append(((k,) + w, self.mul(self.unit(a), vec)))
            level = nxt
        if span.shape[1] < target:
            raise InvariantViolation(f"{self.name}: arrows do not generate the radical")
        words = [None] * n
        for b in self.idem:
            words[b] = [(1, ())]
        C = la.solve(span, la.eye(n)[:, list(self.radical_indices)], p)
        for j, b in enumerate(self.radical_indices):
            words[b] = [(int(C[i, j]), kept_words[i]) for i in range(len(kept_words)) if C[i, j]]
        self._arrows = tuple(arrows)
        self._words = words

    # -- structure checks --------------------------------------------------
    def verify(self, exhaustive_limit=64, samples=2000, seed=0):
        """Check associativity, idempotent rules and nilpotency of the radical."""
        p = self.p
        n = self.dim
        T = self.table
        # idempotents
        for v, e in enumerate(self.idem):
            for b in range(n):
                left = T[e, b]
                right = T[b, e]
                exp_l = self.unit(b) if self.tgt[b] == v else np.zeros(n, dtype=np.int64)
                exp_r = self.unit(b) if self.src[b] == v else np.zeros(n, dtype=np.int64)
                if not (np.array_equal(left, exp_l) and np.array_equal(right, exp_r)):
                    raise InvariantViolation(f"{self.name}: idempotent e_{self.vertices[v]} misbehaves on {self.labels[b]}")
        # grading by vertices: b*c lies in e_tgt(b) A e_src(c)
        for b in range(n):
            for c in range(n):
                row = T[b, c]
                if row.any():
                    if self.src[b] != self.tgt[c]:
                        raise InvariantViolation(f"{self.name}: product of non-composable elements")
                    nz = np.flatnonzero(row)
                    if np.any(self.tgt[nz] != self.tgt[b]) or np.any(self.src[nz] != self.src[c]):
                        raise InvariantViolation(f"{self.name}: product leaves its corner")
        # radical is an ideal
        idem = list(self.idem)
        for b in self.radical_indices:
            for c in range(n):
                if T[b, c][idem].any() or T[c, b][idem].any():
                    raise InvariantViolation(f"{self.name}: radical is not an ideal")
        # associativity
        if n <= exhaustive_limit:
            # (b_i b_j) b_k  vs  b_i (b_j b_k), one i at a time
            flat = T.reshape(n, n * n)
            pairs = T.reshape(n * n, n)
            for i in range(n):
                lhs = la.matmul(T[i], flat, p).reshape(n, n, n)
                rhs = la.matmul(pairs, T[i], p).reshape(n, n, n)
                if not np.array_equal(lhs, rhs):
                    raise InvariantViolation(f"{self.name}: multiplication is not associative")
        else:
            rng = np.random.default_rng(seed)
            for _ in range(samples):
                i, j, k = (int(x) for x in rng.integers(0, n, 3))
                a = self.mul(T[i, j], self.unit(k))
                b = self.mul(self.unit(i), T[j, k])
                if not np.array_equal(a, b):
                    raise InvariantViolation(f"{self.name}: multiplication is not associative")
        self.radical_powers  # raises if not nilpotent
        return True

    # -- opposite ------------------------------------------------------------
    def opposite(self) -> "BasedAlgebra":
        if self._op is None:
            # share arrows so that modules and their duals use the same arrow positions
            words = [[(c, tuple(reversed(w))) for c, w in lst] for lst in self.words]
            op = BasedAlgebra(self.p, self.vertices, self.labels, self.tgt, self.src,
                              self.table.transpose(1, 0, 2), self.idem, self._degree,
                              self._arrows, words, name=self.name + "^op",
                              composition=self.composition, arrow_labels=self._arrow_labels)
            op._op = self
            self._op = op
        return self._op

    def summary(self) -> dict:
        return {
            "name": self.name,
            "p": self.p,
            "dim": self.dim,
            "vertices": list(self.vertices),
            "loewy_length": self.loewy_length,
            "radical_layers": list(self.layer_dims),
            "cartan": self.cartan().tolist(),
        }

    def __repr__(self):
        return f"BasedAlgebra({self.name}, dim={self.dim}, vertices={len(self.vertices)})"


def build_based_algebra(pres: AlgebraPresentation, term_budget: int = 2_000_000) -> BasedAlgebra:
    """Build the algebra kQ/I on its basis of normal paths."""
    rs = check_admissible(pres, term_budget)
    q = pres.quiver
    nv = len(q.vertices)
    words = [()] * nv + rs.normal_words()
    n = len(words)
    index = {w: i for i, w in enumerate(words[nv:], start=nv)}
    src = [v for v in range(nv)] + [pres.path_source(w) for w in words[nv:]]
    tgt = [v for v in range(nv)] + [pres.path_target(w) for w in words[nv:]]
    labels = [f"e{v}" for v in q.vertices] + [pres.word_label(w) for w in words[nv:]]
    degree = [0] * nv + [len(w) for w in words[nv:]]
    T = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if src[i] != tgt[j]:
                continue
            if i < nv:
                T[i, j, j] = 1
                continue
            if j < nv:
                T[i, j, i] = 1
                continue
            for w, c in rs.normal_form({words[i] + words[j]: 1}).items():
                T[i, j, index[w]] = c
    arrows = [index[(k,)] for k in range(len(q.arrows))]
    # words in arrow positions: arrow index k is arrow position k
    wl = [[(1, ())] for _ in range(nv)] + [[(1, w)] for w in words[nv:]]
    A = BasedAlgebra(pres.p, q.vertices, labels, src, tgt, T, list(range(nv)), degree,
                     arrows, wl, name=pres.name, presentation=pres,
                     composition=pres.composition,
                     arrow_labels=tuple(a.label for a in q.arrows))
    A.rewriting = rs
    A.normal_paths = tuple(words)
    return A
