import json
import subprocess
import sys

import pytest

from itdist import __version__
from itdist.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def run_json(capsys, tmp_path, *argv, name="out.json"):
    path = tmp_path / name
    rc, out, err = run(capsys, *argv, "--json", str(path))
    return rc, out, json.loads(path.read_text())


# -- worked examples ---------------------------------------------------------------------

def test_itbound_z4(capsys):
    rc, out, _ = run(capsys, "itbound", "fixtures/z4.alg")
    assert rc == 0
    assert out.splitlines()[0] == "bound 1, V = ∅, ℓℓ = 3"


def test_itbound_exterior(capsys):
    rc, out, _ = run(capsys, "itbound", "fixtures/ext2.alg")
    assert rc == 0 and out.startswith("bound 1,")


def test_syzygy_periodic(capsys):
    rc, out, _ = run(capsys, "syzygy", "fixtures/loop2.alg", "S", "-n", "5")
    assert rc == 0 and "isomorphic to S: yes" in out


# -- subcommands ------------------------------------------------------------------------------

def test_build(capsys):
    rc, out, _ = run(capsys, "build", "fixtures/z4.alg")
    assert rc == 0 and "dim 60" in out and "Loewy length 3" in out


def test_basis(capsys):
    rc, out, _ = run(capsys, "basis", "a2")
    assert rc == 0 and len(out.splitlines()) == 3


def test_resolve(capsys, tmp_path):
    rc, out, data = run_json(capsys, tmp_path, "resolve", "a2", "S(1)")
    assert rc == 0 and "pd = 1" in out
    assert data["command"] == "resolve" and data["exit_status"] == 0


def test_loewy(capsys):
    rc, out, _ = run(capsys, "loewy", "ext3")
    assert rc == 0 and "Loewy length 4" in out and "[1, 3, 3, 1]" in out


def test_layer_length(capsys):
    rc, out, _ = run(capsys, "layer-length", "a2", "--V", "2")
    assert rc == 0 and out.splitlines()[0].endswith(": 1")


def test_phi(capsys):
    rc, out, _ = run(capsys, "phi", "a2", "S(1)")
    assert rc == 0 and "Phi = 1" in out and "Psi = 1" in out


def test_decompose(capsys):
    rc, out, _ = run(capsys, "decompose", "a2", "P(1)+S(2)+S(2)")
    assert rc == 0 and "S(2)^2" in out and "P(1)" in out


def test_certify(capsys):
    rc, out, _ = run(capsys, "certify-syzfin", "nak2")
    assert rc == 0 and "certificate monomial-ZH" in out


def test_itreport_with_assertion(capsys, tmp_path):
    rc, out, data = run_json(capsys, tmp_path, "itreport", "z4", "--assert", "not-syzygy-finite")
    assert rc == 0
    assert "IT.dist(A)=1" in out.splitlines()
    assert data["report"]["lower"] == data["report"]["upper"] == 1


def test_construct_chain(capsys, tmp_path):
    script = tmp_path / "chain.txt"
    script.write_text("C = load fig3\n"
                      "S1 = module C S\n"
                      "B = opext C S1\n"
                      "F = load fig2\n"
                      "compare B F\n"
                      "A1 = load fig1\n"
                      "L = tails A1 2 3 2 2\n"
                      "R = load lambda22\n"
                      "compare L R\n")
    rc, out, data = run_json(capsys, tmp_path, "construct", str(script))
    assert rc == 0
    assert "B vs F: structural match" in out and "L vs R: structural match" in out
    assert [s["op"] for s in data["report"]["steps"]].count("compare") == 2


def test_construct_reports_differing_fingerprints(capsys, tmp_path):
    script = tmp_path / "co.txt"
    script.write_text("B = load fig2\nM = module B S(1)\nA = opcoext B M\nF = load fig1\ncompare A F\n")
    rc, out, _ = run(capsys, "construct", str(script))
    assert rc == 0 and "A vs F: fingerprints differ" in out


def test_dercat_check(capsys, tmp_path):
    rc, out, data = run_json(capsys, tmp_path, "dercat-check", "z4", "--seeds", "3")
    assert rc == 0 and "0 failures over 3 seeds" in out
    assert data["report"]["counts"]["additivity"] == {"pass": 3}


def test_fixtures_run_single(capsys, tmp_path):
    rc, out, data = run_json(capsys, tmp_path, "fixtures", "run", "loop2")
    assert rc == 0 and "IT.dist = 0 (certified)" in out


# -- exit codes ---------------------------------------------------------------------------------

def test_exit_parse_error(capsys):
    rc, _, err = run(capsys, "syzygy", "a2", "Q(1)")
    assert rc == 2 and "cannot read module" in err


def test_exit_missing_file(capsys):
    rc, _, err = run(capsys, "build", "no/such/file.alg")
    assert rc == 2


def test_exit_bad_script_keyword(capsys, tmp_path):
    script = tmp_path / "bad.txt"
    script.write_text("x = frob\n")
    rc, _, err = run(capsys, "construct", str(script))
    assert rc == 2 and "bad.txt:1" in err


def test_exit_unknown_vertex_in_script(capsys, tmp_path):
    script = tmp_path / "v.txt"
    script.write_text("B = load fig2\nL = tails B 2 9 1 1\n")
    rc, _, err = run(capsys, "construct", str(script))
    assert rc == 2 and "unknown vertex" in err


def test_exit_invariant_violation(capsys, tmp_path):
    f = tmp_path / "na.alg"
    f.write_text("vertices v\narrow x: v -> v\nnilpotency 3\n")
    rc, _, err = run(capsys, "build", str(f))
    assert rc == 3 and "x*x*x" in err


def test_exit_resource(capsys):
    rc, _, err = run(capsys, "syzygy", "z4", "S(1)", "-n", "8")
    assert rc == 4 and "budget" in err


def test_exit_uncertified(capsys):
    rc, _, err = run(capsys, "itreport", "z4", "--require-certificate")
    assert rc == 5
    rc, _, _ = run(capsys, "certify-syzfin", "z4", "--require-certificate", "--depth", "2")
    assert rc == 5
    rc, _, _ = run(capsys, "itreport", "loop2", "--require-certificate")
    assert rc == 0


def test_exit_bad_prime(capsys):
    rc, _, err = run(capsys, "loewy", "a2", "--p", "100")
    assert rc == 2 and "not prime" in err


def test_json_written_on_failure(capsys, tmp_path):
    rc, _, data = run_json(capsys, tmp_path, "syzygy", "z4", "S(1)", "-n", "8")
    assert rc == 4 and data["exit_status"] == 4 and data["report"] is None


# -- report contents and determinism ---------------------------------------------------------

def test_report_embeds_config(capsys, tmp_path):
    _, _, data = run_json(capsys, tmp_path, "itreport", "ext2", "--seed", "7")
    cfg = data["config"]
    assert cfg["seed"] == 7 and cfg["cutoffs"] == {"cutoff": 32, "depth": 8}
    assert cfg["version"] == __version__
    assert cfg["composition_convention"] == "from-file"
    rep = data["report"]
    assert rep["p"] == 101 and rep["composition_convention"] == "function"
    assert rep["version"] == __version__ and rep["seed"] == 7


def test_json_is_deterministic(capsys, tmp_path):
    args = ["itreport", "ext2", "--seed", "3"]
    run(capsys, *args, "--json", str(tmp_path / "a.json"))
    run(capsys, *args, "--json", str(tmp_path / "b.json"))
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "itdist.cli", "loewy", "a3"], capture_output=True, text=True)
    assert r.returncode == 0 and "Loewy length 3" in r.stdout


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
