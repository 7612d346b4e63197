import json
import os
import subprocess
import sys

import pytest

import oddsym.cli as cli
import oddsym.verify as verify

DATA = os.path.join(os.path.dirname(__file__), "data")


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_darboux_n1_golden(capsys):
    code, out, _ = run_cli(
        ["darboux", "--manifest", os.path.join(DATA, "n1_rescale.json")],
        capsys)
    assert code == 0
    assert out == (
        "step0[F1].x1: x1\n"
        "step0[F1].th1: 1/(x1 + 1)*th1\n"
        "composite.x1: x1\n"
        "composite.th1: 1/(x1 + 1)*th1\n"
        "residuals: all zero\n")


def test_tau_sharp_worked_example_golden(capsys):
    path = os.path.join(DATA, "worked_example.json")
    code, out, _ = run_cli(["tau-sharp", "--manifest", path], capsys)
    assert code == 0
    assert out == "coefficient: 1 + b2*th0*th1 - b1*th0*th2 + b0*th1*th2\n"
    code, out, _ = run_cli(["pullback-surface", "--manifest", path], capsys)
    assert code == 0
    assert out == "coefficient: b2*th1 - b1*th2\n"
    code, out, _ = run_cli(["tau-sharp-inv", "--manifest", path], capsys)
    assert code == 0
    assert out == "form: b0*dx0 + b1*dx1 + b2*dx2 - dx0^dx1^dx2\n"


def test_bracket_and_delta0_golden(capsys):
    path = os.path.join(DATA, "bracket.json")
    code, out, _ = run_cli(["bracket", "--manifest", path], capsys)
    assert code == 0 and out == "bracket: th2\n"
    code, out, _ = run_cli(["delta0", "--manifest", path], capsys)
    assert code == 0 and out == "delta0: -x1*th1 + x2*th2\n"


def test_flow_command(capsys):
    path = os.path.join(DATA, "bracket.json")
    code, out, _ = run_cli(["flow", "--manifest", path], capsys)
    assert code == 0
    assert out == (
        "x1: x1 - 1/2*x1*th2*b1\n"
        "x2: x2 + 1/2*x1*th1*b1\n"
        "th1: th1 + 1/2*th1*th2*b1\n"
        "th2: th2\n"
        "canonical: yes\n")


def test_reports_are_deterministic(capsys):
    path = os.path.join(DATA, "worked_example.json")
    first = run_cli(["tau-sharp", "--manifest", path], capsys)
    second = run_cli(["tau-sharp", "--manifest", path], capsys)
    assert first == second


def test_json_report(capsys):
    path = os.path.join(DATA, "bracket.json")
    code, out, _ = run_cli(["bracket", "--manifest", path, "--json"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["command"] == "bracket"
    assert payload["results"] == [{"label": "bracket", "value": "th2"}]
    assert payload["ok"] is None


def test_out_file(tmp_path, capsys):
    path = os.path.join(DATA, "bracket.json")
    target = tmp_path / "report.txt"
    code, out, _ = run_cli(
        ["bracket", "--manifest", path, "--out", str(target)], capsys)
    assert code == 0
    assert out == ""
    assert target.read_text() == "bracket: th2\n"


def test_verify_suite_exit_zero(capsys):
    code, out, _ = run_cli(["verify", "--suite", "tau-table"], capsys)
    assert code == 0
    assert out.endswith("verify: pass\n")
    for line in out.splitlines()[:-1]:
        assert ": ok" in line


def test_verify_failure_exit_one(monkeypatch, capsys):
    def broken():
        return [verify.Check("forced", False, "synthetic failure")]

    monkeypatch.setitem(verify.SUITES, "tau-table", broken)
    code, out, _ = run_cli(["verify", "--suite", "tau-table"], capsys)
    assert code == 1
    assert "FAIL synthetic failure" in out
    assert out.endswith("verify: fail\n")


def test_bad_manifest_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out, err = run_cli(
        ["bracket", "--manifest", str(bad)], capsys)
    assert code == 2
    assert "error:" in err


def test_bad_expression_exit_two(tmp_path, capsys):
    doc = {
        "charts": {"c": {"n": 1, "even": ["x1"], "odd": ["th1"]}},
        "bracket": {"chart": "c", "f": "x1 +* 2", "g": "th1"},
    }
    bad = tmp_path / "expr.json"
    bad.write_text(json.dumps(doc))
    code, out, err = run_cli(["bracket", "--manifest", str(bad)], capsys)
    assert code == 2
    assert "error:" in err


def test_unknown_reference_exit_two(tmp_path, capsys):
    doc = {"darboux": {"structure": "nope"}}
    bad = tmp_path / "ref.json"
    bad.write_text(json.dumps(doc))
    code, out, err = run_cli(["darboux", "--manifest", str(bad)], capsys)
    assert code == 2


def test_operator_commands_golden(capsys):
    path = os.path.join(DATA, "operators.json")
    expected = {
        "delta-vol": "delta_vol: th1*th2\n",
        "delta-sharp": "delta_sharp: th2\n",
        "berezinian": "berezinian: 4\n",
        "shift": "coefficient: th1*th2 + th1*b2 - th2*b1 + b1*b2\n",
        "star": "form: -2*dx1^dx2\n",
        "dual-density": "coefficient: x1*th1\n",
        "densities-p": "P0: 1\nP1: -x1*th1\n",
    }
    for command, want in expected.items():
        code, out, _ = run_cli([command, "--manifest", path], capsys)
        assert code == 0, command
        assert out == want, command


def test_hamiltonian_from_map_command(capsys):
    path = os.path.join(DATA, "operators.json")
    code, out, _ = run_cli(["hamiltonian-from-map", "--manifest", path],
                           capsys)
    assert code == 0
    assert out == "generator: x1*th1*th2*b1\nround_trip: exact\n"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "oddsym.cli", "delta0", "--manifest",
         os.path.join(DATA, "bracket.json")],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "delta0: -x1*th1 + x2*th2\n"


@pytest.mark.parametrize("command,manifest,golden", [
    ("darboux", "n1_rescale.json", "n1_rescale.golden"),
    ("tau-sharp", "worked_example.json", "worked_example_tau_sharp.golden"),
    ("densities-p", "operators.json", "operators_densities_p.golden"),
])
def test_golden_files(command, manifest, golden, capsys):
    code, out, _ = run_cli(
        [command, "--manifest", os.path.join(DATA, manifest)], capsys)
    assert code == 0
    with open(os.path.join(DATA, golden), "r", encoding="utf-8") as handle:
        assert out == handle.read()


def test_verify_json_deterministic(capsys):
    first = run_cli(["verify", "--suite", "darboux", "--json"], capsys)
    second = run_cli(["verify", "--suite", "darboux", "--json"], capsys)
    assert first == second
    assert first[0] == 0
