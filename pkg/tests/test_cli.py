import json
import subprocess
import sys

import pytest

from morita_workbench import cli
from morita_workbench.report import parse_text


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_groupoid(finite_corpus, capsys):
    code, out, _ = run(["validate", str(finite_corpus / "pair2.json")], capsys)
    assert code == 0 and "OK" in out


def test_validate_malformed(finite_corpus, capsys):
    code, out, _ = run(["validate", str(finite_corpus / "malformed.json")], capsys)
    assert code == 2 and "parse-error" in out


def test_validate_axiom_violation_prints_witnesses(finite_corpus, capsys):
    code, out, _ = run(["validate", str(finite_corpus / "bad_compose.json"), "--format", "json"], capsys)
    assert code == 3
    sec = json.loads(out)["sections"][str(finite_corpus / "bad_compose.json")]
    assert sec["status"] == "axiom-error" and sec["witnesses"] == [1, 2, 3]


def test_validate_bibundle_needs_groupoids(finite_corpus, capsys):
    path = str(finite_corpus / "rect_2x3.json")
    assert run(["validate", path], capsys)[0] == 2
    code, out, _ = run(["validate", path, "--left", "pair:2", "--right", str(finite_corpus / "pair3.json")], capsys)
    assert code == 0


def test_validate_manifest(manifest_dir, capsys):
    code, out, _ = run(["validate", str(manifest_dir / "scaling_action.json")], capsys)
    assert code == 0 and "manifest" in out


def test_morita_rectangle(finite_corpus, capsys):
    f = finite_corpus
    code, out, _ = run(["morita", str(f / "pair2.json"), str(f / "pair3.json"), str(f / "rect_2x3.json")], capsys)
    assert code == 0
    assert "oracle: equivalent" in out


def test_morita_non_equivalence(finite_corpus, capsys):
    f = finite_corpus
    code, out, _ = run(["morita", "pair:2", "unit:2", str(f / "pair2_unit2_left.json")], capsys)
    assert code == 4 and "M/H = G_0 via tau" in out


def test_morita_oracle_disagreement(finite_corpus, capsys, monkeypatch):
    monkeypatch.setattr(cli, "morita_oracle", lambda G, H: False)
    f = finite_corpus
    code, out, _ = run(["morita", "cyclic:2", str(f / "z2.json"), str(f / "z2_self.json")], capsys)
    assert code == 5 and "disagree" in out


def test_poisson_rectangle(capsys):
    argv = ["poisson", "--example", "rect:2x3", "--check", "orthogonality,commuting,anti-poisson", "--seed", "42"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert out.startswith("# PASS")


def test_poisson_action_axioms(capsys):
    assert run(["poisson", "--example", "aff1-on-line", "--check", "action-axioms"], capsys)[0] == 0


def test_poisson_manifest(manifest_dir, capsys):
    argv = ["poisson", "--manifest", str(manifest_dir / "aff1_on_line.json"), "--check", "anti-poisson,algebroid"]
    assert run(argv, capsys)[0] == 0


@pytest.mark.parametrize("argv", [
    ["poisson", "--example", "klein-bottle"],
    ["poisson", "--example", "pair:2", "--check", "telepathy"],
    ["poisson", "--example", "pair:2", "--check", "orthogonality"],
    ["poisson"],
    ["poisson", "--example", "pair:2", "--samples", "0"],
    ["poisson", "--example", "pair:2", "--tol", "-1"],
    ["poisson", "--example", "pair:2", "--seed", str(2**64)],
    ["report"],
    ["frobnicate"],
])
def test_input_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_failing_check_exits_4(capsys):
    # a tolerance no finite-difference residual can meet
    code, out, _ = run(["poisson", "--example", "aff1-on-line", "--check", "anti-poisson", "--tol", "1e-30"], capsys)
    assert code == 4 and out.startswith("# FAIL")


def test_json_output_is_byte_identical_across_runs(tmp_path, capsys):
    paths = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        argv = ["poisson", "--example", "aff1", "--check", "algebroid,compose", "--seed", "7", "--format", "json",
                "--out", str(p)]
        assert run(argv, capsys)[0] == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_text_output_matches_json(tmp_path, capsys):
    base = ["poisson", "--example", "pair:2", "--check", "anti-poisson", "--seed", "3"]
    run(base + ["--out", str(tmp_path / "r.txt")], capsys)
    run(base + ["--format", "json", "--out", str(tmp_path / "r.json")], capsys)
    assert parse_text((tmp_path / "r.txt").read_text()) == json.loads((tmp_path / "r.json").read_text())


def test_report_merges_text_and_json(tmp_path, finite_corpus, capsys):
    run(["poisson", "--example", "pair:1", "--check", "algebroid", "--out", str(tmp_path / "a.txt")], capsys)
    f = finite_corpus
    run(["morita", str(f / "pair2.json"), str(f / "pair3.json"), str(f / "rect_2x3.json"), "--format", "json",
         "--out", str(tmp_path / "b.json")], capsys)
    code, out, _ = run(["report", str(tmp_path / "a.txt"), str(tmp_path / "b.json"), "--format", "json"], capsys)
    merged = json.loads(out)
    assert code == 0 and set(merged["sections"]) == {"a", "b"}
    assert merged["sections"]["b"]["command"] == "morita"


def test_console_script_entry_point(finite_corpus):
    proc = subprocess.run([sys.executable, "-m", "morita_workbench.cli", "validate", str(finite_corpus / "z3.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "OK" in proc.stdout
