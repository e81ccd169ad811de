import json
from fractions import Fraction

import numpy as np
import pytest

from lowt.boolfn import make_named, save_table
from lowt.circuit import parse, serialize, t_count
from lowt.cli import main
from lowt.pipeline import build_generator, frac_str, nominal_t_count, resolve_method, target_hash
from lowt.errors import ParameterError
from lowt.sketch import sketch_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def strip_time(doc):
    return {k: v for k, v in doc.items() if k != "timestamp"}


# -- analyze ---------------------------------------------------------------------

def test_analyze_or4(capsys, validate):
    code, doc = run_json(capsys, "analyze", "--family", "or", "--n", "4", "--epsilon", "0.01")
    assert code == 0
    validate(doc, "analyze_report")
    assert doc["one_norm"] == "15/8" and doc["k_or"] == 9 and doc["k_fourier"] == 189
    assert doc["pdt_depth"] == 4


def test_analyze_xor3(capsys):
    code, doc = run_json(capsys, "analyze", "--family", "xor", "--n", "3")
    assert code == 0 and doc["one_norm"] == "1" and doc["pdt_depth"] == 1


def test_analyze_table_file(capsys, tmp_path):
    save_table(make_named("maj", n=5), tmp_path / "f.json")
    code, doc = run_json(capsys, "analyze", "--table", str(tmp_path / "f.json"))
    assert code == 0 and doc["n"] == 5


def test_analyze_text_format(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "or", "--n", "2", "--format", "text")
    assert code == 0 and "one_norm: 3/2" in out


# -- synthesize ------------------------------------------------------------------

def test_synthesize_or64(capsys, tmp_path, validate):
    code, _, _ = run(capsys, "synthesize", "--family", "or", "--n", "64", "--epsilon", "1/8",
                     "--batch", "4", "--out", str(tmp_path))
    assert code == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    validate(man, "manifest")
    assert man["k"] == 5
    assert [c["t_count"] for c in man["circuits"]] == [49] * 4
    for entry in man["circuits"]:
        c = parse((tmp_path / entry["circuit"]).read_bytes())
        assert t_count(c).t_count == 49
        sk = sketch_from_json(json.loads((tmp_path / entry["sketch"]).read_text()))
        validate(json.loads((tmp_path / entry["sketch"]).read_text()), "sketch")
        assert sk.n == 64 and sk.k == 5


def test_synthesize_k0(capsys, tmp_path):
    code, _, _ = run(capsys, "synthesize", "--family", "or", "--n", "6", "--k", "0",
                     "--out", str(tmp_path))
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert code == 0 and man["circuits"][0]["t_count"] == 0
    c = parse((tmp_path / man["circuits"][0]["circuit"]).read_bytes())
    assert not c.gates


@pytest.mark.parametrize("fmt,suffix", [("json", "json"), ("qasm-like", "qasm")])
def test_synthesize_formats(capsys, tmp_path, fmt, suffix):
    code, _, _ = run(capsys, "synthesize", "--family", "maj", "--n", "3", "--k", "5",
                     "--format", fmt, "--out", str(tmp_path))
    assert code == 0 and list(tmp_path.glob(f"circuit_*.{suffix}"))


def test_synthesize_batch_determinism(capsys, tmp_path):
    for d in ("a", "b"):
        assert main(["synthesize", "--family", "or", "--n", "12", "--epsilon", "0.1",
                     "--batch", "100", "--seed", "77", "--out", str(tmp_path / d)]) == 0
    capsys.readouterr()
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert strip_time(a) == strip_time(b)
    for f in (tmp_path / "a").iterdir():
        if f.name != "manifest.json":
            assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_seed_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("LOWT_SEED", "4242")
    main(["synthesize", "--family", "or", "--n", "8", "--k", "3", "--out", str(tmp_path)])
    capsys.readouterr()
    assert json.loads((tmp_path / "manifest.json").read_text())["seed"] == 4242


# -- verify ----------------------------------------------------------------------

def test_verify_or8_k5(capsys, validate):
    code, doc = run_json(capsys, "verify", "--family", "or", "--n", "8", "--k", "5",
                         "--trials", "2000", "--per-input")
    assert code == 0 and doc["passed"]
    validate(doc, "verify_report")
    assert doc["channel"]["diamond_certificate"] == 0.125
    assert len(doc["channel"]["per_input"]) == 256


def test_verify_fourier_or3(capsys):
    code, doc = run_json(capsys, "verify", "--family", "or", "--n", "3", "--k", "64",
                         "--method", "fourier", "--trials", "3000")
    assert code == 0
    ch = doc["channel"]
    assert ch["max_error"] <= 0.146 and ch["diamond_certificate"] <= 0.584


def test_verify_tiny_runs_channel_checks(capsys):
    code, doc = run_json(capsys, "verify", "--family", "or", "--n", "2", "--k", "2", "--trials", "500")
    assert code == 0 and doc["checks"]["tiny_channel_within_certificate"]
    assert doc["exact_channel_tiny"]["basis_0"] == 0


def test_verify_large_n_degrades_with_warning(capsys):
    code, doc = run_json(capsys, "verify", "--family", "or", "--n", "30", "--k", "4",
                         "--trials", "200", "--batch", "1")
    assert code == 0 and any("Monte Carlo" in w for w in doc["warnings"])


def _circuit_pair(capsys, tmp_path):
    assert main(["synthesize", "--family", "or", "--n", "5", "--k", "3", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    return tmp_path / "circuit_0000.txt", tmp_path / "sketch_0000.json"


def test_verify_circuit_file(capsys, tmp_path):
    circ, sk = _circuit_pair(capsys, tmp_path)
    code, doc = run_json(capsys, "verify", "--circuit", str(circ), "--sketch", str(sk))
    assert code == 0 and doc["passed"]


def test_verify_tampered_circuit(capsys, tmp_path):
    circ, sk = _circuit_pair(capsys, tmp_path)
    lines = circ.read_text().splitlines()
    i = next(i for i, l in enumerate(lines) if l.startswith("CX"))
    circ.write_text("\n".join(lines[:i] + lines[i + 1:]) + "\n")
    code, doc = run_json(capsys, "verify", "--circuit", str(circ), "--sketch", str(sk))
    assert code == 1 and not doc["passed"]


# -- nullity ---------------------------------------------------------------------

def test_nullity_commands(capsys, validate):
    code, doc = run_json(capsys, "nullity", "--ccz-plus", "--n", "3")
    validate(doc, "nullity_report")
    assert code == 0 and doc["nullity"] == 3 and doc["max_pauli_overlap"] == pytest.approx(0.5)
    code, doc = run_json(capsys, "nullity", "--state", "zero", "--n", "4")
    assert code == 0 and doc["nullity"] == 0
    code, doc = run_json(capsys, "nullity", "--state", "t-tensor", "--copies", "2")
    assert code == 0 and doc["nullity"] == 2


def test_nullity_state_file(capsys, tmp_path):
    from lowt.verify.statevector import ccz_plus_state, write_statevector

    write_statevector(tmp_path / "s.bin", ccz_plus_state(4))
    code, doc = run_json(capsys, "nullity", "--state-file", str(tmp_path / "s.bin"))
    assert code == 0 and doc["nullity"] == 4


# -- bench -----------------------------------------------------------------------

def test_bench_small(capsys, validate):
    code, doc = run_json(capsys, "bench", "--rows", "or,cw,meq", "--trials", "100")
    validate(doc, "bench_report")
    assert code == 0 and doc["passed"] and all(doc["t_count_flat"].values())


def test_bench_or_at_eighth(capsys):
    # 50 trials is too few for the empirical max over 65536 inputs; only T-count and exact error here
    _, doc = run_json(capsys, "bench", "--rows", "or", "--epsilon", "1/8", "--trials", "50")
    assert {r["t_count"] for r in doc["rows"]} == {r["sampled_t_count"] for r in doc["rows"]} == {49}
    assert doc["t_count_flat"]["or"] and all(r["max_exact_error"] <= 1 / 8 for r in doc["rows"])


# -- usage errors ----------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["analyze"],
    ["analyze", "--family", "or"],
    ["analyze", "--family", "or", "--n", "3", "--epsilon", "1.5"],
    ["synthesize", "--family", "const0", "--n", "3", "--epsilon", "0.1", "--method", "fourier"],
    ["synthesize", "--family", "or", "--n", "3"],
    ["synthesize", "--family", "maj", "--n", "3", "--epsilon", "0.1", "--method", "table"],
    ["verify", "--family", "or", "--n", "3", "--k", "2", "--trials", "0"],
    ["verify", "--circuit", "missing.txt"],
    ["nullity", "--ccz-plus", "--n", "9"],
    ["nullity", "--ccz-plus"],
    ["bench", "--rows", "gt"],
    ["analyze", "--table", "does-not-exist.json"],
    ["synthesize", "--family", "or", "--n", "4", "--k", "2", "--seed", "-1"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_version(capsys):
    assert main(["--version"]) == 0


# -- pipeline --------------------------------------------------------------------

def test_resolve_method():
    assert resolve_method("or", "auto") == "or"
    assert resolve_method("hw", "auto") == "table"
    assert resolve_method("maj", "auto") == "fourier"
    with pytest.raises(ParameterError):
        resolve_method("or", "magic")


def test_nominal_t_count_flat_in_n():
    assert {nominal_t_count(build_generator(family="or", params={"n": n}, epsilon=Fraction(1, 8)))
            for n in (8, 12, 16, 20, 200)} == {49}


def test_target_hash_stable():
    g = build_generator(family="or", params={"n": 6}, k=3)
    assert target_hash(g) == target_hash(build_generator(family="or", params={"n": 6}, k=4))
    assert target_hash(g) != target_hash(build_generator(family="and", params={"n": 6}, k=3))
    assert len(target_hash(build_generator(family="or", params={"n": 40}, k=3), "or", {"n": 40})) == 64


def test_frac_str():
    assert frac_str(Fraction(3, 1)) == "3" and frac_str(Fraction(3, 4)) == "3/4"
