import json
import shutil

from dulac.corpus import applicable_commands, corpus_verify, default_corpus_dir, entries
from dulac.errors import DulacError
from dulac.problem import parse_problem
from dulac.resonance import toric_decompose

CORPUS = default_corpus_dir()


def parsed():
    out = {}
    for name in entries(CORPUS):
        try:
            out[name] = parse_problem(CORPUS / name / "problem.json")
        except DulacError:
            out[name] = None
    return out


def test_every_entry_is_documented():
    for name in entries(CORPUS):
        assert (CORPUS / name / "PROVENANCE.md").is_file()
        assert (CORPUS / name / "expected").is_dir()


def test_coverage():
    ps = {k: v for k, v in parsed().items() if v is not None}
    assert {p.n for p in ps.values()} >= {1, 2, 3, 4}
    taus = set()
    full = False
    for p in ps.values():
        if p.field.iota is None:
            continue
        try:
            d = toric_decompose(p.eigenvalues)
        except DulacError:
            continue
        taus.add(d.tau)
        full |= d.tau == p.n
    assert taus >= {0, 1, 2} and full
    assert any(any(p.vector_field.linear_matrix()[i][j] for i in range(p.n) for j in range(p.n) if i != j)
               for p in ps.values())
    assert any(p.field.degree > 2 for p in ps.values())


def test_negative_instances_present():
    codes = set()
    for name in entries(CORPUS):
        for f in (CORPUS / name / "expected").glob("*.json"):
            codes.add(json.loads(f.read_text())["exit_code"])
    assert codes == {0, 1, 2, 3}


def test_applicable_commands():
    assert applicable_commands(CORPUS / "reducible-field" / "problem.json") == ["normalize"]
    cmds = applicable_commands(CORPUS / "resonant-saddle" / "problem.json")
    assert {"walcher", "verify-conservation", "check-darboux"} <= set(cmds)
    assert "walcher" not in applicable_commands(CORPUS / "four-dim" / "problem.json")


def test_corpus_verifies():
    summary = corpus_verify()
    assert summary["ok"], summary["mismatches"]


def test_tampered_golden_is_reported(tmp_path):
    root = tmp_path / "c"
    shutil.copytree(CORPUS / "flatten-1d", root / "flatten-1d")
    golden = root / "flatten-1d" / "expected" / "toric.json"
    golden.write_text(golden.read_text().replace('"tau": 1', '"tau": 2'))
    (root / "flatten-1d" / "expected" / "walcher.json").write_text("{}")
    summary = corpus_verify(root)
    assert not summary["ok"]
    assert "flatten-1d/toric: mismatch" in summary["mismatches"]
    assert "flatten-1d/walcher: not produced by the engine" in summary["mismatches"]
    assert corpus_verify(root, regenerate=True)["ok"]
    assert corpus_verify(root)["ok"]
