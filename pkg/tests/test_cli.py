import json
import subprocess
import sys

import pytest

from qbacklund.cli import SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_tq_passes(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "tq", "--n", "3", "--k", "2", "--order", "5")
    assert code == 0
    assert "overall: PASS" in out


def test_verify_json_schema(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "wronskian", "--suite", "tq", "--n", "2", "--k", "1", "--json")
    data = json.loads(out)
    assert code == 0 and data["schema"] == SCHEMA and data["command"] == "verify"
    assert [s["suite"] for s in data["suites"]] == ["tq", "wronskian"]
    for s in data["suites"]:
        assert "seconds" not in s
        for rep in s["reports"]:
            assert {"identity", "n", "k", "order", "pass"} <= set(rep)


def test_verify_reports_failures(capsys):
    # the quantum suite includes the stated Q^- lemma, which does not hold
    code, out, _ = run(capsys, "verify", "--suite", "backlund-quantum", "--n", "2", "--k", "1", "--order", "2")
    assert code == 1
    assert "FAIL Qminus-commutation" in out


def test_json_is_deterministic(capsys):
    args = ("fusion", "--n", "3", "--k", "2", "--json")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    assert json.loads(first)["entries"]


def test_fusion_q_zero_text(capsys):
    code, out, _ = run(capsys, "fusion", "--n", "3", "--k", "2", "--q-zero")
    assert code == 0
    assert "[1] * [1, 1] = [] + [2, 1]" in out


def test_whittaker_export(capsys):
    code, out, _ = run(capsys, "whittaker", "--shape", "2", "--vars", "2", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["terms"] == [{"m": [2], "coeff": "1"}, {"m": [1, 1], "coeff": "1 + q^2"}]


def test_backlund_classical_export(capsys):
    code, out, _ = run(capsys, "backlund", "--mode", "classical", "--n", "3", "--order", "1", "--site", "1")
    assert code == 0
    assert "psi~_{1,0} = psi1" in out


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "2", "--k", "1", "--json")
    data = json.loads(out)
    assert code == 0 and len(data["states"]) == 2 and data["report"]["pass"]


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "tq", "--n", "9"],
    ["verify", "--suite", "tq", "--q", "1.5"],
    ["whittaker", "--shape", "1,2"],
    ["verify", "--suite", "nonsense"],
    ["backlund", "--n", "3", "--site", "7"],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_unsafe_size_lifts_the_bound(capsys):
    assert main(["verify", "--suite", "tq", "--n", "6", "--k", "0", "--order", "6"]) == 2
    assert main(["verify", "--suite", "tq", "--n", "6", "--k", "0", "--order", "6", "--unsafe-size"]) == 0


def test_output_file(tmp_path, capsys):
    target = tmp_path / "t.json"
    assert main(["fusion", "--n", "2", "--k", "1", "--json", "-o", str(target)]) == 0
    assert json.loads(target.read_text())["schema"] == SCHEMA


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qbacklund", "verify", "--suite", "frobenius", "--n", "3",
                           "--k", "2"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert "[PASS] frobenius" in proc.stdout
