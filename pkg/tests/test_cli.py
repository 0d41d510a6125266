import json
import subprocess
import sys

import pytest

from handlecalc import FramedLink
from handlecalc.cli import EXIT_INPUT, EXIT_NOT_GUARANTEED, EXIT_OK, main, run


def result(argv):
    code, rep = run(["--no-timestamp"] + argv)
    return code, rep["result"]


def test_log_transform_budget():
    code, res = result(["check-log-transform", "--n", "2", "--p", "3", "--q", "4"])
    assert code == EXIT_OK and res["feasible"] == "yes"
    rows = {r["name"]: r["value"] for r in res["ledger"]}
    assert rows["stage2Need"] == rows["remainder"] == 13


def test_verify_monodromy():
    code, res = result(["verify-monodromy", "1"])
    assert code == EXIT_OK and res["pass"]


def test_unlink_two():
    code, res = result(["unlink", "2", "--emit-script"])
    assert code == EXIT_OK and res["framings"] == [-4, -6]
    assert res["script"]["schema"] == "mvs-1"


def test_build_chain_verify():
    code, res = result(["build-chain", "4", "--verify"])
    assert code == EXIT_OK and res["cross_validation"]["passed"]


def test_not_guaranteed_exit():
    code, res = result(["check-knot-surgery", "--n", "1", "--torus", "10", "11"])
    assert code == EXIT_NOT_GUARANTEED and res["feasible"] == "notGuaranteed"


def test_knot_surgery_with_braid():
    code, res = result(["check-knot-surgery", "--n", "1", "--bridge", "3", "--braid", "T(2,5)"])
    assert code == EXIT_OK


@pytest.mark.parametrize("argv", [
    ["check-log-transform", "--n", "2", "--p", "4", "--q", "6"],
    ["check-knot-surgery", "--n", "1"],
    ["check-knot-surgery", "--n", "1", "--bridge", "2", "--braid", "T(1,9)"],
    ["invariants", "/nonexistent/file.json"],
    ["verify-monodromy", "0"],
])
def test_input_errors(argv):
    code, res = result(argv)
    assert code == EXIT_INPUT and "error" in res


def test_invariants_file(tmp_path):
    path = tmp_path / "link.json"
    path.write_text(FramedLink.from_framings([-2, -2], [[-2, 1], [1, -2]]).to_json())
    code, res = result(["invariants", str(path)])
    assert code == EXIT_OK and res["invariants"]["abs_determinant"] == 3


def test_bad_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"schema": "flk-1"')
    assert result(["invariants", str(path)])[0] == EXIT_INPUT


def test_config_echo_and_timestamp():
    _, rep = run(["--seed", "7", "unlink", "1"])
    assert rep["config"]["seed"] == 7 and "generated_at" in rep
    _, rep2 = run(["--seed", "7", "unlink", "1"])
    rep.pop("generated_at"), rep2.pop("generated_at")
    assert json.dumps(rep, sort_keys=True) == json.dumps(rep2, sort_keys=True)


def test_text_output(capsys):
    assert main(["--format", "text", "check-log-transform", "--n", "2", "--p", "3", "--q", "4"]) == 0
    out = capsys.readouterr().out
    assert "verdict: yes" in out and "stage2Need" in out


def test_benchmark_fields():
    code, res = result(["benchmark", "--max-m", "2"])
    row = res["problems"][0]
    assert code == EXIT_OK and {"states_per_second", "dedup_hit_rate", "peak_frontier"} <= row.keys()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "handlecalc", "unlink", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["framings"] == [-7, -7]
