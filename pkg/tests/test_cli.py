"""CLI round trips, deterministic artifacts and exit codes."""

import json

import pytest

from greedylab.cli import main


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def schedule_file(tmp_path):
    return write(tmp_path / "sched.json", {"a": [4, 5, 6, 7], "K": 3})


@pytest.fixture
def vector_file(tmp_path):
    return write(tmp_path / "vec.json", {"groups": [[0, "2", "20"], [1, "1", "20"]]})


def test_norm_command(tmp_path, schedule_file, vector_file, capsys):
    assert main(["norm", "--space", schedule_file, "--vector", vector_file]) == 0
    blob = json.loads(capsys.readouterr().out)
    assert blob["power_exact"] == "36"  # 4*4 + 20
    assert blob["float"] == pytest.approx(6.0)


def test_sigma_gamma_commands(tmp_path, schedule_file, vector_file, capsys):
    assert main(["sigma", "--space", schedule_file, "--vector", vector_file, "--N", "20"]) == 0
    sigma_blob = json.loads(capsys.readouterr().out)
    assert sigma_blob["sigma"]["power_exact"] == "16"
    assert main(["gamma", "--space", schedule_file, "--vector", vector_file, "--N", "20"]) == 0
    gamma_blob = json.loads(capsys.readouterr().out)
    assert gamma_blob["gamma"]["power_exact"] == "20"


def test_errors_csv(tmp_path, schedule_file, vector_file):
    out = tmp_path / "errors.csv"
    assert main([
        "--out", str(out), "errors", "--space", schedule_file, "--vector", vector_file,
    ]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "k,sigma_sq,gamma_sq,sigma_float,gamma_float"
    assert len(lines) == 42  # header + k = 0..40
    k20 = lines[21].split(",")
    assert k20[0] == "20" and k20[1] == "16" and k20[2] == "20"


def test_demfun_csv_matches_spec_example(tmp_path, capsys):
    mini = write(tmp_path / "mini.json", {"a": [4, 5, 6, 7]})
    out = tmp_path / "demfun.csv"
    assert main(["--out", str(out), "demfun", "--space", mini, "--max-N", "40"]) == 0
    rows = {int(line.split(",")[0]): line.split(",") for line in out.read_text().strip().split("\n")[1:]}
    assert rows[20][1] == "4" and rows[20][3] == "2"
    assert rows[40][1] == "20" and rows[40][3].startswith("4.4721359549995")


def test_demfun_output_is_byte_deterministic(tmp_path):
    mini = write(tmp_path / "mini.json", {"a": [4, 5, 6, 7]})
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["--out", str(out1), "demfun", "--space", mini, "--max-N", "40"])
    main(["--out", str(out2), "demfun", "--space", mini, "--max-N", "40"])
    assert out1.read_bytes() == out2.read_bytes()


def test_doubling_scan_csv(tmp_path, schedule_file):
    out = tmp_path / "scan.csv"
    assert main(["--out", str(out), "doubling-scan", "--space", schedule_file, "--k", "1..2"]) == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 3
    assert lines[1].split(",")[0] == "1" and "True" in lines[1]


def test_prefix_check_reports_counterexample(tmp_path, schedule_file, capsys):
    out = tmp_path / "prefix.csv"
    assert main(["--out", str(out), "prefix-check", "--space", schedule_file, "--max-N", "45"]) == 0
    err = capsys.readouterr().err
    assert "counterexamples" in err and "40" in err


def test_cghm_and_check71_round_trip(tmp_path):
    hl = write(tmp_path / "hl.json", {"kind": "one_plus_log2"})
    hr = write(tmp_path / "hr.json", {"kind": "sqrt"})
    out = tmp_path / "cghm.json"
    assert main([
        "--out", str(out), "cghm", "--hl", hl, "--hr", hr, "--alpha", "0.25", "--count", "5",
    ]) == 0
    blob = json.loads(out.read_text())
    assert len(blob["w"]) == 5 and not blob["exhausted"]
    assert main([
        "check71", "--hl", hl, "--hr", hr, "--pairs", str(out), "--C", "1", "--alpha", "0.25",
    ]) == 0


def test_check71_failing_pairs_exit_1(tmp_path, capsys):
    hl = write(tmp_path / "hl.json", {"kind": "sqrt"})
    hr = write(tmp_path / "hr.json", {"kind": "sqrt"})
    pairs = write(tmp_path / "pairs.json", [[2, 4], [2, 2048]])
    assert main(["check71", "--hl", hl, "--hr", hr, "--pairs", pairs, "--C", "1", "--alpha", "0.5"]) == 1


def test_xs_experiment_json_schema(tmp_path):
    sched = write(tmp_path / "squares.json", {"a": [4, 9, 16, 25]})
    out = tmp_path / "report.json"
    assert main([
        "--out", str(out), "xs-experiment", "--schedule", sched,
        "--s", "2,3", "--alpha", "1", "--q", "1,inf",
    ]) == 0
    blob = json.loads(out.read_text())
    assert set(blob) == {"runs"} and len(blob["runs"]) == 4
    for run in blob["runs"]:
        assert {"s", "alpha", "q", "A", "G", "ratio", "envelope", "checks"} <= set(run)
    assert blob["runs"][1]["q"] == "inf"


def test_xs_experiment_shallow_schedule_diagnostic(tmp_path, capsys):
    sched = write(tmp_path / "squares.json", {"a": [4, 9, 16, 25]})
    code = main(["xs-experiment", "--schedule", sched, "--s", "99", "--alpha", "1", "--q", "1"])
    assert code == 1
    assert "too shallow" in capsys.readouterr().err


def test_empty_report_emission(tmp_path):
    from greedylab.cli import emit_report

    out = tmp_path / "empty.json"
    emit_report({"runs": []}, "json", str(out))
    assert json.loads(out.read_text()) == {"runs": []}
    emit_report({"runs": []}, "json", str(out))
    assert out.read_text() == '{\n  "runs": []\n}\n'


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_verify_subset(capsys):
    assert main(["verify", "--only", "1,3"]) == 0
    out = capsys.readouterr().out
    assert "criterion 1" in out and "criterion 3" in out and "criterion 2" not in out
