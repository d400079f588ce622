import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from tvdual.cli import main

from conftest import DATA

Q4 = str(DATA / "quotient4.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_quotient_example(capsys):
    code, out, _ = run(capsys, "check", Q4)
    record = json.loads(out)
    assert code == 0
    assert record["verdict"] == "pass"
    assert record["primal"] == record["dual"] == record["oracle"] == "1/2"


def test_solve_reports_value_witness_and_coupling(capsys):
    code, out, _ = run(capsys, "solve", Q4)
    record = json.loads(out)
    assert code == 0
    assert record["value"] == "1/2"
    assert record["witness"] == ["3", "4"]
    assert sum(sum(map(Fraction, row)) for row in record["coupling"]) == 1


def test_solve_greedy_strategy(capsys):
    code, out, _ = run(capsys, "solve", Q4, "--strategy", "greedy-diagonal")
    assert code == 0 and json.loads(out)["value"] == "1/2"


def test_tv_subcommand(capsys):
    code, out, _ = run(capsys, "tv", str(DATA / "two_atoms.json"))
    assert code == 0
    assert json.loads(out) == {"command": "tv", "dual_value": "1/4", "witness": ["b"]}


def test_galois_subcommand(capsys):
    code, out, _ = run(capsys, "galois", str(DATA / "galois_family.json"))
    record = json.loads(out)
    assert code == 0
    assert record["E_star_atoms"] == [["a", "b", "c"], ["d"]]
    assert record["double_dual_equal"] is True
    assert record["G_star_classes"] == [["a", "b"], ["c"], ["d"]]


def test_galois_accepts_non_measurable_relations(capsys):
    code, out, _ = run(capsys, "galois", str(DATA / "nonmeasurable.json"))
    record = json.loads(out)
    assert code == 0
    assert record["is_measurable"] is False and record["double_dual_equal"] is False


def test_chain_subcommand(capsys):
    code, out, _ = run(capsys, "chain", str(DATA / "grid_chain.json"))
    record = json.loads(out)
    assert code == 0
    assert record["value"] == "1/2" and record["ledger"] is True
    assert [s["success_mass"] for s in record["trace"]] == ["1/4", "1/4"]


def test_non_measurable_relation_exits_2(capsys):
    code, out, err = run(capsys, "solve", str(DATA / "nonmeasurable.json"))
    assert code == 2 and out == ""
    assert "is_measurable" in err


@pytest.mark.parametrize("name", ["short_mass", "nontransitive"])
def test_invalid_files_exit_2(capsys, name):
    code, _, err = run(capsys, "check", str(DATA / f"{name}.json"))
    assert code == 2
    assert "invalid instance" in err


def test_missing_file_and_bad_usage_exit_2(capsys):
    assert run(capsys, "solve", str(DATA / "absent.json"))[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "check")[0] == 2
    assert run(capsys, "solve", Q4, "--arith", "float")[0] == 2


def test_random_batch_is_deterministic(capsys):
    first = run(capsys, "check", "--random", "5", "--seed", "7", "--max-atoms", "12")
    second = run(capsys, "check", "--random", "5", "--seed", "7", "--max-atoms", "12")
    other = run(capsys, "check", "--random", "5", "--seed", "8", "--max-atoms", "12")
    assert first == second
    assert first[0] == 0
    assert first[1] != other[1]
    assert all(r["verdict"] == "pass" for r in json.loads(first[1]))


def test_csv_output(capsys):
    code, out, _ = run(capsys, "demo", "reassort", "--horizon", "3", "11", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["value"] for r in rows] == ["1/4", "63/512"]


def test_demo_bitflip_horizon_three(capsys):
    code, out, _ = run(capsys, "demo", "bitflip", "--horizon", "3")
    record = json.loads(out)
    assert code == 0
    assert record["success_mass"] == "1/2" and record["marginals_uniform"] is True


def test_demo_asymmetry_flags_the_printed_value(capsys):
    code, out, _ = run(capsys, "demo", "asymmetry", "--n", "10")
    record = json.loads(out)
    assert code == 0
    assert record["delta_value"] == "1/2"
    assert record["printed_value"] == "1/4"
    assert "differs" in record["note"]


def test_demo_orbit_and_float_arith(capsys):
    code, out, _ = run(capsys, "demo", "orbit", "--arith", "float")
    record = json.loads(out)
    assert code == 0
    assert record["value"] == "0.875"


def test_demo_poisson(capsys):
    code, out, _ = run(capsys, "demo", "poisson", "--m", "30")
    record = json.loads(out)
    assert code == 0
    assert float(record["equal_outside_value"]) == 0.0


def test_out_flag_writes_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "check", Q4, "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["verdict"] == "pass"


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tvdual.cli", "check", Q4],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pass"
