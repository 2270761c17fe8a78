import json

import pytest

import nofcorners.protocol as protocol
from nofcorners.cli import main
from nofcorners.shift_cover import GridSet, ShiftFamily


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines()]


def test_params(capsys):
    code, out, _ = run(capsys, "params", "--n", "32", "--format", "json-lines")
    assert code == 0
    cfg, rec = records(out)
    assert cfg["config"]["n"] == 32 and cfg["config"]["seed"] == 0
    assert (rec["d"], rec["q"]) == (4, 3)
    code, out, _ = run(capsys, "params", "--n", "32")
    assert out.startswith("# ") and "d " in out


def test_params_large_prints_analytic(capsys):
    code, out, _ = run(capsys, "params", "--n", str(2 ** 20), "--format", "json-lines")
    rec = records(out)[1]
    assert code == 0 and rec["analytic_cost"] > rec["leading_term"] > 0


def test_params_usage_error(capsys):
    code, _, err = run(capsys, "params", "--n", "1")
    assert code == 2 and "error" in err


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "10", "2", "3", "5", "--format", "json-lines")
    rec = records(out)[1]
    assert code == 0 and rec["decision"] == "accept"
    assert rec["transcript"].endswith("11")
    code, out2, _ = run(capsys, "simulate", "--n", "10", "2", "3", "6", "--format", "json-lines")
    assert records(out2)[1]["decision"] == "reject"
    _, again, _ = run(capsys, "simulate", "--n", "10", "2", "3", "5", "--format", "json-lines")
    assert again == out


def test_simulate_range_error(capsys):
    code, _, err = run(capsys, "simulate", "--n", "10", "2", "3", "11")
    assert code == 2


def test_simulate_smeared(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "40", "--mode", "smeared",
                       "--budget-slack", "1", "7", "9", "24", "--format", "json-lines")
    rec = records(out)[1]
    assert code == 0 and rec["decision"] == "accept"
    assert "shift_index_width" in rec


def test_verify_exhaustive(capsys):
    code, out, _ = run(capsys, "verify", "--n", "64", "--format", "json-lines")
    rec = records(out)[1]
    assert code == 0 and rec["verified"] and rec["checked"] == 65 ** 3


def test_verify_needs_samples_above_ceiling(capsys):
    code, _, err = run(capsys, "verify", "--n", "65")
    assert code == 2 and "--samples" in err


def test_verify_fault_injection(capsys, monkeypatch):
    real = protocol.encode_carry

    def flipped(C, ys, params):
        s = real(C, ys, params)
        if not any(C):
            return s
        return s[:-1] + ("1" if s[-1] == "0" else "0")

    monkeypatch.setattr(protocol, "encode_carry", flipped)
    code, out, _ = run(capsys, "verify", "--n", "20", "--format", "json-lines")
    rec = records(out)[1]
    assert code == 1 and rec["counterexample"] is not None


def test_verify_sampled(capsys):
    code, out, _ = run(capsys, "verify", "--n", "1000", "--samples", "3000",
                       "--format", "json-lines")
    assert code == 0 and records(out)[1]["sweep"] == "sampled"


def test_build_then_check_set(capsys, tmp_path):
    path = tmp_path / "set.txt"
    code, out, _ = run(capsys, "build-set", "--n", "64", "--out", str(path),
                       "--format", "json-lines")
    rec = records(out)[1]
    assert code == 0 and rec["corner_free"]
    assert GridSet.load(path).size == rec["size"]
    code, out, _ = run(capsys, "check-set", str(path), "--format", "json-lines")
    assert code == 0 and records(out)[1]["corner_free"]


def test_check_set_finds_corner(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("N 3\n1 1\n1 2\n2 1\n")
    code, out, _ = run(capsys, "check-set", str(path), "--format", "json-lines")
    assert code == 1 and records(out)[1]["counterexample"] == [1, 1, 1]


def test_check_set_malformed(capsys, tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("N 3\n1 1\noops\n")
    code, _, err = run(capsys, "check-set", str(path))
    assert code == 2 and "line 3" in err
    code, _, err = run(capsys, "check-set", str(tmp_path / "missing.txt"))
    assert code == 2


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "--n", "16", "32", "--format", "json-lines")
    rows = records(out)[1:]
    assert code == 0 and [r["N"] for r in rows] == [16, 32]
    code, out, _ = run(capsys, "compare", "--n", "16", "32")
    assert "protocol_size" in out.splitlines()[1]


def test_cover(capsys, tmp_path):
    path = tmp_path / "cover.txt"
    code, out, _ = run(capsys, "cover", "--n", "128", "--budget-slack", "0", "--out", str(path),
                       "--format", "json-lines")
    rec = records(out)[1]
    assert code == 0 and rec["verified"] and rec["shifts"] <= 560
    assert len(ShiftFamily.load(path)) == rec["shifts"]
    code, out, _ = run(capsys, "cover", "--n", "64", "--method", "random", "--seed", "3",
                       "--format", "json-lines")
    assert code == 0 and records(out)[1]["verified"]


def test_cover_empty_good_set(capsys):
    code, _, err = run(capsys, "cover", "--n", "128", "--budget-slack", "-20")
    assert code == 2


def test_costs(capsys):
    code, out, _ = run(capsys, "costs", "--n", "64", "--format", "json-lines")
    rec = records(out)[1]
    assert code == 0 and rec["pairs"] == 65 ** 2 and rec["good_fraction"] >= 0.5


def test_json_lines_byte_identical(capsys):
    argv = ["cover", "--n", "64", "--method", "random", "--seed", "5", "--format", "json-lines"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    argv = ["verify", "--n", "500", "--samples", "500", "--seed", "9", "--format", "json-lines"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_missing_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
