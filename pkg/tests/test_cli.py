import json
import subprocess
import sys

import pytest

from expdiv.cli import CommandPlan, UsageError, default_word, main, parse
from expdiv.arith import parse_function


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_plans():
    p = parse(["series", "verify", "--function", "E3tau", "--order", "48"])
    assert p.subcommand == "series verify" and p.params["order"] == 48 and p.fmt == "json"
    p = parse(["pair", "search", "--objective", "theta(1,16)", "--max-len", "9", "--exhaustive"])
    assert p.subcommand == "pair search" and p.params["m"] == 16 and p.params["exhaustive"]
    p = parse(["pair", "eval", "A^3BA^2BA^4B", "I"])
    assert p.params["word"] == "A^3BA^2BA^4B I"
    assert parse(["sum", "run", "--function", "Etau", "--checkpoints", "10,100"]).fmt == "csv"


def test_plan_round_trip():
    p = parse(["exponent", "report", "--m", "2", "--k", "3", "--rh", "--format", "text"])
    assert CommandPlan.from_json(p.to_json()) == p


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["series", "verify", "--function", "zeta"],
        ["series", "verify", "--function", "E3tau", "--word", "1:x"],
        ["pair", "eval", "A", "X"],
        ["pair", "search", "--objective", "theta(1,16,16)"],
        ["pair", "search", "--objective", "theta(1,1)"],
        ["pair", "search", "--objective", "theta(1,16)", "--exhaustive", "--max-len", "30"],
        ["pair", "search", "--objective", "theta(1,16)", "--seeds", "H99"],
        ["exponent", "beta", "--a", "1", "--b", "2", "--c", "3", "--theta", "8/2x"],
        ["exponent", "beta", "--a", "1", "--b", "2", "--c", "7", "--theta", "1/10"],
        ["exponent", "report", "--m", "2", "--k", "1"],
        ["sum", "run", "--function", "Etau", "--checkpoints", "100,10"],
        ["support", "scan", "--m", "1", "--bound", "100000000"],
        ["series", "verify", "--function", "E3tau", "--frobnicate"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("expdiv: error:")


def test_series_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "series", "verify", "--function", "E3tau", "--order", "48")
    d = json.loads(out)
    assert code == 0 and d["passed"] and d["claimed_order"] == 49
    code, out, _ = run(capsys, "series", "verify", "--function", "E2tau")
    d = json.loads(out)
    assert code == 1 and d["first_bad_degree"] == 8
    code, out, _ = run(capsys, "series", "verify", "--function", "Etau", "--word", "1:1", "--claimed", "3")
    assert code == 1 and json.loads(out)["first_bad_degree"] == 2


def test_series_factor(capsys):
    code, out, _ = run(capsys, "series", "factor", "--function", "Egauss", "--order", "4")
    assert code == 0 and json.loads(out)["word"]["factors"] == [["1", 1], ["2", 2], ["3", -1]]


def test_default_words():
    assert default_word(parse_function("E3tau")).as_pairs()[1] == (16, 1)
    assert default_word(parse_function("E3tau4")).as_pairs()[1] == (16, 3)
    assert default_word(parse_function("Etau3")).as_pairs() == [(1, 1), (2, 2)]
    assert default_word(parse_function("tau")) is None


def test_pair_commands(capsys):
    code, out, _ = run(capsys, "pair", "search", "--objective", "theta(1,16)", "--max-len", "12", "--exhaustive")
    d = json.loads(out)
    assert code == 0 and d["best"]["theta"] == "15/307" and d["best"]["word"] == "A^3BA^2BA^4B I"
    code, out, _ = run(capsys, "pair", "eval", "A", "H05", "--m", "4")
    d = json.loads(out)
    assert code == 0 and d["theta"] is None and d["condition"] == "13/474"
    code, out, _ = run(capsys, "pair", "search", "--objective", "theta(1,4)", "--max-len", "0")
    assert code == 1 and json.loads(out)["best"] is None


def test_exponent_commands(capsys):
    code, out, _ = run(capsys, "exponent", "report", "--m", "2", "--k", "2", "--rh")
    d = json.loads(out)
    assert code == 0 and d["best_error_exponent"]["value"] == "73/1254"
    assert d["omega_exponent"]["value"] == "1/34"
    code, out, _ = run(capsys, "exponent", "report", "--m", "2", "--k", "2", "--format", "text")
    assert "1/17" in out
    code, out, _ = run(capsys, "exponent", "beta", "--a", "1", "--b", "2", "--c", "3", "--theta", "8/25")
    assert code == 0 and json.loads(out)["value"] == "17/52"


def test_theta_table(capsys):
    code, out, _ = run(capsys, "theta", "table", "--format", "text")
    assert code == 0 and "15/307" in out and "1448/10331" in out


def test_sum_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "sum", "run", "--function", "Etau", "--checkpoints", "10,100")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0] == "x,sum,main,secondary,delta" and rows[2].startswith("100,151,")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# schedule\ncheckpoints = 1000,3162,10000,31622\nshard = 5000\n")
    code, out, _ = run(capsys, "sum", "fit", "--function", "E2tau", "--config", str(cfg))
    d = json.loads(out)
    assert code == 0 and d["checkpoints"] == [1000, 3162, 10000, 31622] and d["scale"] == 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("checkpoints\n")
    assert run(capsys, "sum", "run", "--function", "Etau", "--config", str(bad))[0] == 2


def test_support_commands(capsys):
    code, out, _ = run(capsys, "support", "scan", "--m", "1", "--bound", "13")
    assert code == 0 and json.loads(out)["elements"] == [4, 8, 9, 12]
    code, out, _ = run(capsys, "support", "scan", "--m", "2", "--bound", "100", "--check-structure")
    assert code == 0 and json.loads(out)["status"] == "pass"
    code, out, _ = run(capsys, "support", "scan", "--m", "1", "--bound", "20", "--check-structure")
    assert code == 1 and json.loads(out)["status"] == "fail"


def test_output_file_and_determinism(capsys, tmp_path):
    dest = tmp_path / "r.json"
    argv = ["exponent", "report", "--m", "3", "--k", "3", "--rh"]
    assert main(argv + ["--output", str(dest)]) == 0
    assert capsys.readouterr().out == ""
    first = dest.read_bytes()
    main(argv + ["--output", str(dest)])
    assert dest.read_bytes() == first
    run(capsys, *argv)
    assert run(capsys, *argv)[1].encode() == first


def test_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "expdiv.cli", "exponent", "beta", "--a", "1", "--b", "16", "--c", "17", "--theta", "15/307"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and '"value": "73/1254"' in r.stdout


def test_usage_error_type():
    with pytest.raises(UsageError):
        parse(["pair"])
