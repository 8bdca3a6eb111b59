import json

import pytest

from fracloop.cli import build_config, main, parse_config_file
from fracloop.suites import BudgetError, RunConfig


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment\n"
        "suite = wzw\n"
        "seed = 11   # inline comment\n"
        "p_list = 0,1\n"
        "q_list = 0.25 0.5\n"
        "tol.car = 1e-12\n"
        "\n")
    entries = parse_config_file(str(cfg))
    rc = build_config(entries, {})
    assert rc.suite == "wzw"
    assert rc.seed == 11
    assert rc.p_list == (0, 1)
    assert rc.q_list == (0.25, 0.5)
    assert rc.tol == {"car": 1e-12}


def test_cli_flags_override_the_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 11\nwindow_k = 30\n")
    rc = build_config(parse_config_file(str(cfg)),
                      {"seed": 99, "n_f": 4})
    assert rc.seed == 99
    assert rc.window_k == 30
    assert rc.n_f == 4


def test_unknown_config_keys_are_rejected():
    with pytest.raises(ValueError):
        build_config({"windw": "24"}, {})


def test_budget_refusal_happens_before_compute(capsys):
    assert main(["--suite", "cocycles", "--window", "2"]) == 2
    assert "refused" in capsys.readouterr().err
    with pytest.raises(BudgetError):
        RunConfig(suite="wzw", n_f=2, level=2).validate()


def test_verify_emits_the_report_schema(capsys):
    assert main(["--suite", "wzw", "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["suite"] == "wzw"
    ids = [c["id"] for c in body["checks"]]
    assert ids == sorted(ids)
    for c in body["checks"]:
        assert set(c) >= {"id", "anchor", "residual", "tol", "pass"}
    assert body["summary"]["failed"] == []


def test_failing_check_sets_exit_code_and_digest(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("suite = wzw\ntol.car = 1e-18\n")
    assert main(["--config", str(cfg), "--format", "json"]) == 1
    body = json.loads(capsys.readouterr().out)
    failing = [c for c in body["checks"] if not c["pass"]]
    assert [c["id"] for c in failing] == ["car"]
    assert failing[0]["digest"]  # inputs digest travels with the failure


def test_repeated_runs_are_bit_identical(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["--suite", "wzw", "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["--suite", "wzw", "--out", str(out)]) == 0
    capsys.readouterr()
    assert out.read_bytes() == first


def test_scan_emits_long_format_csv(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert main(["scan", "--axis", "q", "--out", str(out)]) == 0
    capsys.readouterr()
    lines = out.read_text().splitlines()
    assert lines[0] == "axis,value,observable,observed"
    assert all(line.startswith("q,") for line in lines[1:])
    assert len(lines) == 10
