"""Command line interface: ``itdist <command> ...``.

Exit status: 0 success, 2 parse error, 3 invariant violation, 4 resource
budget exceeded, 5 no certificate while ``--require-certificate`` is set.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import constructions as cn
from . import dercat as dc
from . import homology as ho
from . import invariants as iv
from . import linalg as la
from . import modrep as mr
from . import randgen as rg
from .algebra import BasedAlgebra
from .errors import Inconclusive, InvariantViolation, ParseError, ResourceError
from .registry import FIXTURE_META, fixture_names, load_algebra, meta, resolve_path

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_RESOURCE, EXIT_UNCERTIFIED = 0, 2, 3, 4, 5


# ---------------------------------------------------------------------------
# session: loaded entities and global configuration

class Session:
    def __init__(self, args):
        self.seed = args.seed
        self.cutoff = args.cutoff
        self.depth = args.depth
        self.composition = args.composition
        self.p = args.p
        self.require_certificate = args.require_certificate
        self.entities: dict = {}

    def bind(self, key, value):
        if key in self.entities:
            raise ParseError(f"identifier {key!r} is already bound")
        self.entities[key] = value
        return value

    def get(self, key):
        try:
            return self.entities[key]
        except KeyError:
            raise ParseError(f"unknown identifier {key!r}") from None

    def algebra(self, spec: str):
        return load_algebra(spec, self.composition, self.p)

    def config(self):
        return {"version": __version__, "seed": self.seed,
                "cutoffs": {"cutoff": self.cutoff, "depth": self.depth},
                "composition_convention": self.composition or "from-file", "p": self.p or "from-file"}


_TOKEN = re.compile(r"^(rad\s+|soc\s+|top\s+)?([PSI])(?:\(\s*([^)\s]+)\s*\))?$")


def parse_module_spec(A, spec: str) -> mr.ModuleRep:
    """'S(1)', 'P(2)+I(1)', 'rad P(1)', bare 'S' over a one-vertex algebra, or a module file."""
    path = Path(spec)
    if path.is_file():
        return mr.parse_module(path.read_text(encoding="utf-8"), A, source=str(path))
    parts = []
    for tok in spec.split("+"):
        m = _TOKEN.match(tok.strip())
        if not m:
            raise ParseError(f"cannot read module {tok.strip()!r}; expected e.g. S(1), P(v), I(v) or a file")
        op, kind, v = m.group(1), m.group(2), m.group(3)
        if v is None:
            if A.nv != 1:
                raise ParseError(f"module {tok.strip()!r} needs a vertex: the algebra has {A.nv} vertices")
            v = A.vertices[0]
        if v not in A.vertices:
            raise ParseError(f"unknown vertex {v!r} in module {tok.strip()!r}")
        M = mr.standard_module(A, kind, v)
        if op:
            op = op.strip()
            if op == "rad":
                M = mr.submodule(M, mr.rad_bases(M))[0]
            elif op == "soc":
                M = mr.submodule(M, mr.socle_bases(M))[0]
            else:
                M = mr.quotient(M, mr.rad_bases(M))[0]
        parts.append(M)
    return parts[0] if len(parts) == 1 else mr.direct_sum(parts)[0]


def describe_summands(M: mr.ModuleRep, seed: int = 0):
    """Names the indecomposable summands that are standard modules."""
    A = M.A
    out = []
    if M.dim == 0:
        return out
    std = [(f"{k}({A.vertices[v]})", mr.standard_module(A, k, v)) for k in "SPI" for v in range(A.nv)]
    for X, mult in mr.decompose(M, seed).classes:
        name = next((n for n, Y in std if mr.fingerprint(Y) == mr.fingerprint(X)
                     and mr.iso_indecomposable(Y, X) is not None), None)
        out.append({"summand": name or f"indecomposable{list(X.dims)}", "dims": list(X.dims),
                    "multiplicity": mult})
    return out


def _fmt_summands(items):
    return " + ".join(f"{d['summand']}^{d['multiplicity']}" if d["multiplicity"] > 1 else d["summand"]
                      for d in items) or "0"


def _parse_V(A, text):
    if text is None or text.strip() in ("", "-", "{}", "none"):
        return ()
    names = [t for t in re.split(r"[,\s]+", text.strip("{} ")) if t]
    for v in names:
        if v not in A.vertices:
            raise ParseError(f"unknown vertex {v!r} in --V")
    return tuple(names)


# ---------------------------------------------------------------------------
# commands: each returns (text, report dict)

def cmd_build(s: Session, a):
    A = s.algebra(a.file)
    fp = cn.fingerprint(A)
    rep = {"algebra": A.name, "dim": A.dim, "vertices": list(A.vertices), "arrows": list(A.arrow_labels),
           "loewy": A.loewy_length, "fingerprint": fp.as_dict(), "verified": bool(A.verify())}
    text = (f"built {A.name}: dim {A.dim}, {A.nv} vertices, {len(A.arrows)} arrows, "
            f"Loewy length {A.loewy_length}\ncartan = {fp.cartan}\n")
    return text, rep


def cmd_basis(s, a):
    A = s.algebra(a.alg)
    rows = [{"index": b, "label": A.labels[b], "source": A.vertices[int(A.src[b])],
             "target": A.vertices[int(A.tgt[b])], "degree": int(A.degree[b])} for b in range(A.dim)]
    text = "".join(f"{r['index']:>4}  {r['label']:<20} {r['source']} -> {r['target']}  (degree {r['degree']})\n"
                   for r in rows)
    return text, {"algebra": A.name, "basis": rows}


def cmd_resolve(s, a):
    A = s.algebra(a.alg)
    M = parse_module_spec(A, a.module)
    seg = ho.min_resolution(M, s.cutoff)
    d = ho.pd(M, s.cutoff)
    text = seg.betti_table() + f"\npd = {d}\n"
    if seg.truncated:
        text += "note: stopped by the dimension budget\n"
    rep = {"algebra": A.name, "module": a.module, "betti": seg.betti(), "pd": d.as_json(),
           "complete": seg.complete, "truncated": seg.truncated}
    return text, rep


def cmd_syzygy(s, a):
    A = s.algebra(a.alg)
    M = parse_module_spec(A, a.module)
    O = ho.syzygy(M, a.n)
    summ = describe_summands(O, s.seed)
    iso, _ = mr.is_isomorphic(O, M, s.seed)
    text = (f"Omega^{a.n}({a.module}): dims {list(O.dims)}\nsummands: {_fmt_summands(summ)}\n"
            f"isomorphic to {a.module}: {'yes' if iso else 'no'}\n")
    if a.show:
        text += mr.module_text(O, A.name)
    return text, {"algebra": A.name, "module": a.module, "n": a.n, "dims": list(O.dims), "summands": summ,
                  "isomorphic_to_input": bool(iso), "module_text": mr.module_text(O, A.name)}


def cmd_loewy(s, a):
    A = s.algebra(a.alg)
    layers = list(A.layer_dims)
    return (f"Loewy length {A.loewy_length}\nradical layers {layers}\n",
            {"algebra": A.name, "loewy": A.loewy_length, "radical_layers": layers})


def cmd_layer_length(s, a):
    A = s.algebra(a.alg)
    V = _parse_V(A, a.V)
    M = parse_module_spec(A, a.module) if a.module else ho.regular_module(A)
    r = iv.layer_length(M, V)
    target = a.module or "A"
    return (f"layer length of {target} for V = {{{', '.join(V)}}}: {r.value}\nchain dims {r.chain_dims}\n",
            {"algebra": A.name, "module": target, "V": list(V), "layer_length": r.value,
             "chain_dims": r.chain_dims})


def cmd_itbound(s, a):
    A = s.algebra(a.alg)
    ub = iv.it_upper_bound(A, s.cutoff)
    V = "{" + ", ".join(ub.best_V) + "}" if ub.best_V else "∅"
    text = f"bound {ub.bound}, V = {V}, ℓℓ = {A.loewy_length}\n"
    for r in ub.table:
        text += f"  V = {{{', '.join(r.V)}}}: layer length {r.layer_length} -> {r.bound}\n"
    if not ub.exhaustive:
        text += "note: non-exhaustive over V\n"
    return text, {"algebra": A.name, "loewy": A.loewy_length, **ub.as_json()}


def _assertions(a):
    return tuple(a.assertions or ())


def cmd_itreport(s, a):
    A = s.algebra(a.alg)
    r = iv.it_report(A, pd_cutoff=s.cutoff, depth=s.depth, seed=s.seed,
                     external_assertions=_assertions(a), reference=a.reference)
    if s.require_certificate and not r.data["certificates"]["certificates"] and r.data["lower"] != r.data["upper"]:
        raise Inconclusive(f"{A.name}: IT.dist not determined ({r.data['verdict']})")
    return r.text(), r.as_json()


def cmd_phi(s, a):
    A = s.algebra(a.alg)
    gens = [parse_module_spec(A, m) for m in a.modules]
    r = iv.phi_psi(gens, min(s.cutoff, a.window), s.cutoff, s.seed)
    text = f"Phi = {r.phi}\nPsi = {r.psi}\nranks {r.ranks}\n" + "".join(f"note: {n}\n" for n in r.notes)
    return text, {"algebra": A.name, "modules": a.modules, **r.as_json()}


def cmd_decompose(s, a):
    A = s.algebra(a.alg)
    M = parse_module_spec(A, a.module)
    summ = describe_summands(M, s.seed)
    return (f"{a.module} = {_fmt_summands(summ)}\n",
            {"algebra": A.name, "module": a.module, "summands": summ})


def cmd_certify(s, a):
    A = s.algebra(a.alg)
    c = iv.certify_syzygy_finite(A, s.depth, s.seed)
    lines = []
    for x in c.certificates:
        lines.append(f"certificate {x.kind}: {x.n}-syzygy-finite, catalogue of {len(x.catalogue)}")
        lines.extend(f"  {t}" for t in x.transcript)
    for e in c.evidence:
        lines.append(f"evidence: {e.reason}")
    if not c.certified:
        lines.append("no certificate")
        if s.require_certificate:
            raise Inconclusive(f"{A.name}: no syzygy-finiteness certificate within depth {s.depth}")
    return "\n".join(lines) + "\n", {"algebra": A.name, **c.as_json()}


# construction scripts ------------------------------------------------------

_SCRIPT_HELP = """\
construction script lines ('ID =' is optional; unnamed results are bound to _1, _2, ...):
  ID = load PATH                    presentation file or fixture name
  ID = module ALG SPEC              SPEC as on the command line, e.g. S(1), P(2)+I(1)
  ID = field [VERTEX]               the one-vertex algebra k
  ID = bimodule left MOD K          left module MOD as a bimodule over (its algebra, field K)
  ID = bimodule zero B C            the zero B-C-bimodule
  ID = bimodule regular B           B as a B-B-bimodule
  ID = tri B C M                    the triangular matrix algebra [[B, M], [0, C]]
  ID = opext B M [vertex V]         one-point extension of B by the B-module M
  ID = opcoext B M [vertex V]       one-point coextension
  ID = tails B SRC SINK n m         n extensions growing a path into SRC, m coextensions out of SINK
  ID = op A                         the opposite algebra
  fingerprint X | present X | compare X Y
"""


def cmd_construct(s, a):
    path = Path(a.script)
    if not path.is_file():
        raise FileNotFoundError(f"no construction script {a.script!r}")
    out, rep = [], {"script": path.name, "steps": []}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            step = _script_step(s, toks, path.parent)
        except IndexError:
            raise ParseError(f"malformed line {line!r}", lineno, 1, str(path)) from None
        except ParseError as e:
            raise ParseError(e.msg, lineno, 1, str(path)) from None
        out.append(step.pop("text"))
        rep["steps"].append(step)
    return "\n".join(out) + "\n", rep


_ALGEBRA_OPS = ("load", "field", "tri", "opext", "opcoext", "tails", "op")


def _script_step(s, toks, base):
    if len(toks) >= 2 and toks[1] == "=":
        name, toks = toks[0], toks[2:]
    else:
        name = None
    if not toks:
        raise ParseError("empty right-hand side")
    kw = toks[0]
    if kw in ("fingerprint", "present", "compare"):
        if name is not None:
            raise ParseError(f"'{kw}' does not produce a value")
        if kw == "fingerprint":
            fp = cn.fingerprint(s.get(toks[1]))
            return {"op": kw, "id": toks[1], "fingerprint": fp.as_dict(),
                    "text": f"{toks[1]}: {json.dumps(fp.as_dict(), sort_keys=True)}"}
        if kw == "present":
            return {"op": kw, "id": toks[1], "text": cn.present_text(s.get(toks[1])).rstrip()}
        X, Y = s.get(toks[1]), s.get(toks[2])
        same = cn.structural_match(X, Y)
        verdict = "structural match" if same else "fingerprints differ"
        return {"op": kw, "ids": toks[1:3], "structural_match": same, "text": f"{toks[1]} vs {toks[2]}: {verdict}"}
    if name is None:
        name = f"_{len(s.entities) + 1}"
    if kw == "module":
        M = parse_module_spec(s.get(toks[1]), " ".join(toks[2:]))
        s.bind(name, M)
        return {"op": kw, "id": name, "dims": list(M.dims), "text": f"{name}: module of dims {list(M.dims)}"}
    if kw == "bimodule":
        how = toks[1]
        if how == "left":
            Bm = cn.left_bimodule(_module(s, toks[2]), _algebra(s, toks[3]))
        elif how == "zero":
            Bm = cn.zero_bimodule(_algebra(s, toks[2]), _algebra(s, toks[3]))
        elif how == "regular":
            Bm = cn.regular_bimodule(_algebra(s, toks[2]))
        else:
            raise ParseError(f"unknown bimodule form {how!r}")
        s.bind(name, Bm)
        return {"op": kw, "id": name, "dim": Bm.dim, "text": f"{name}: bimodule of dimension {Bm.dim}"}
    if kw not in _ALGEBRA_OPS:
        raise ParseError(f"unknown script keyword {kw!r}")
    if kw == "load":
        p = base / toks[1]
        A = s.algebra(str(p) if p.is_file() else toks[1])
    elif kw == "field":
        A = cn.field_algebra(s.p or 101, toks[1] if len(toks) > 1 else "w")
    elif kw == "tri":
        B, C = _algebra(s, toks[1]), _algebra(s, toks[2])
        Bm = s.get(toks[3])
        if not isinstance(Bm, cn.Bimodule):
            raise ParseError(f"{toks[3]!r} is not a bimodule")
        A = cn.triangular_matrix(B, C, Bm, name=name)
    elif kw in ("opext", "opcoext"):
        vertex = toks[4] if len(toks) > 4 and toks[3] == "vertex" else None
        side = "extension" if kw == "opext" else "coextension"
        A = cn.one_point(_algebra(s, toks[1]), _module(s, toks[2]), side, vertex=vertex, name=name)
    elif kw == "tails":
        # tails B SOURCE SINK n m
        try:
            n, m = int(toks[4]), int(toks[5])
        except ValueError:
            raise ParseError("tails needs integer lengths") from None
        A = cn.attach_tails(_algebra(s, toks[1]), toks[2], toks[3], n, m)
    else:
        A = cn.opposite(_algebra(s, toks[1]))
    s.bind(name, A)
    return {"op": kw, "id": name, "dim": A.dim, "vertices": list(A.vertices),
            "text": f"{name}: algebra of dim {A.dim}, vertices {list(A.vertices)}, Loewy length {A.loewy_length}"}


def _algebra(s, key):
    X = s.get(key)
    if not isinstance(X, BasedAlgebra):
        raise ParseError(f"{key!r} is not an algebra")
    return X


def _module(s, key):
    X = s.get(key)
    if not isinstance(X, mr.ModuleRep):
        raise ParseError(f"{key!r} is not a module")
    return X


def cmd_dercat_check(s, a):
    A = s.algebra(a.alg)
    counts, failures = {}, []
    for k in range(a.seeds):
        seed = s.seed + k
        rng = np.random.default_rng(seed)
        if a.kind == "perfect":
            X, _ = rg.random_nonminimal_complex(A, rng)
            Y, _ = rg.random_nonminimal_complex(A, rng)
        else:
            X = rg.random_module(A, rng, max_tops=1, max_dim=8)
            Y = rg.random_module_complex(A, rng)
        tr = dc.check_syzygy_axioms(X, Y, n=a.n, m=a.m, seed=seed)
        for c in tr.checks:
            counts.setdefault(c.name, {}).setdefault(c.verdict, 0)
            counts[c.name][c.verdict] += 1
        for c in tr.failures():
            failures.append({"seed": seed, "check": c.name, "verdict": c.verdict, "detail": c.detail,
                             "complex": dc.complex_text(dc.as_proj(X))})
    text = "".join(f"{name:<16} " + ", ".join(f"{v} {n}" for v, n in sorted(vs.items())) + "\n"
                   for name, vs in counts.items())
    text += f"{len(failures)} failures over {a.seeds} seeds\n"
    rep = {"algebra": A.name, "seeds": a.seeds, "kind": a.kind, "n": a.n, "m": a.m,
           "counts": counts, "failures": failures}
    if failures:
        rep["text"] = text
        raise _ReportedFailure(text + failures[0]["complex"], rep)
    return text, rep


class _ReportedFailure(InvariantViolation):
    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


def cmd_fixtures(s, a):
    names = fixture_names() if a.name == "all" else [a.name]
    texts, reps = [], {}
    for n in names:
        if n not in fixture_names():
            raise FileNotFoundError(f"no fixture named {n!r}")
        A = s.algebra(n)
        m = meta(n)
        r = iv.it_report(A, pd_cutoff=s.cutoff, depth=s.depth, seed=s.seed,
                         external_assertions=tuple(m.get("external_assertions", ())),
                         reference=m.get("reference"))
        texts.append(f"== {n}\n" + r.text())
        reps[n] = r.as_json()
    return "".join(texts), {"fixtures": reps}


# ---------------------------------------------------------------------------
# parser and entry point

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff", type=int, default=32, help="cutoff for projective dimensions (default 32)")
    common.add_argument("--depth", type=int, default=8, help="syzygy depth for certificates (default 8)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--json", metavar="PATH", help="write the structured report to PATH")
    common.add_argument("--composition", choices=["function", "diagrammatic"],
                        help="override the composition convention of presentation files")
    common.add_argument("--p", type=int, help="override the field characteristic")
    common.add_argument("--require-certificate", action="store_true",
                        help="exit 5 when the answer is not certified")

    ap = argparse.ArgumentParser(prog="itdist", description="Homological invariants of quiver algebras over F_p.",
                                 parents=[common])
    ap.add_argument("--version", action="version", version=f"itdist {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    add("build", cmd_build, "parse and build an algebra").add_argument("file")
    add("basis", cmd_basis, "list the path basis").add_argument("alg")
    p = add("resolve", cmd_resolve, "minimal projective resolution")
    p.add_argument("alg")
    p.add_argument("module")
    p = add("syzygy", cmd_syzygy, "n-th syzygy of a module")
    p.add_argument("alg")
    p.add_argument("module")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--show", action="store_true", help="print the module")
    add("loewy", cmd_loewy, "Loewy length and radical layers").add_argument("alg")
    p = add("layer-length", cmd_layer_length, "t_V radical layer length")
    p.add_argument("alg")
    p.add_argument("--V", default="", help="comma separated vertices")
    p.add_argument("--module", help="module (default: the regular module)")
    add("itbound", cmd_itbound, "layer-length upper bound on IT.dist").add_argument("alg")
    p = add("itreport", cmd_itreport, "assembled IT-distance report")
    p.add_argument("alg")
    p.add_argument("--assert", dest="assertions", action="append", choices=sorted(iv.KNOWN_ASSERTIONS),
                   help="supply an external literature fact")
    p.add_argument("--reference", help="reference value to record in the report")
    p = add("phi", cmd_phi, "Igusa-Todorov functions of a set of modules")
    p.add_argument("alg")
    p.add_argument("modules", nargs="+")
    p.add_argument("--window", type=int, default=8, help="syzygy window (default 8)")
    p = add("decompose", cmd_decompose, "indecomposable summands")
    p.add_argument("alg")
    p.add_argument("module")
    add("certify-syzfin", cmd_certify, "syzygy-finiteness certificates").add_argument("alg")
    p = add("construct", cmd_construct, "run a construction script")
    p.add_argument("script")
    p.epilog = _SCRIPT_HELP
    p.formatter_class = argparse.RawDescriptionHelpFormatter
    p = add("dercat-check", cmd_dercat_check, "syzygy-complex harness on random complexes")
    p.add_argument("alg")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--kind", choices=["perfect", "module"], default="perfect")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("-m", type=int, default=1)
    p = add("fixtures", cmd_fixtures, "run packaged fixtures")
    p.add_argument("action", choices=["run"])
    p.add_argument("name", help="fixture name or 'all'")
    return ap


def _write_json(path, report):
    Path(path).write_text(json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n",
                          encoding="utf-8")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.p is not None and not la.is_prime(args.p):
        print(f"error: --p {args.p} is not prime", file=sys.stderr)
        return EXIT_PARSE
    s = Session(args)
    status, report = EXIT_OK, None
    try:
        text, report = args.fn(s, args)
        sys.stdout.write(text)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        status = EXIT_PARSE
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        status = EXIT_PARSE
    except (KeyError, ValueError) as e:  # unknown vertex names and similar bad input
        print(f"error: {e.args[0] if e.args else e}", file=sys.stderr)
        status = EXIT_PARSE
    except _ReportedFailure as e:
        sys.stdout.write(e.report.pop("text", ""))
        print(f"invariant violation: {args.command}", file=sys.stderr)
        report, status = e.report, EXIT_INVARIANT
    except InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        status = EXIT_INVARIANT
    except ResourceError as e:
        print(f"resource budget exceeded: {e}", file=sys.stderr)
        status = EXIT_RESOURCE
    except Inconclusive as e:
        print(f"not certified: {e}", file=sys.stderr)
        status = EXIT_UNCERTIFIED
    if args.json:
        full = {"command": args.command, "exit_status": status, "config": s.config(), "report": report}
        _write_json(args.json, full)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
