"""
命令行：退出码、JSON 报告与批处理汇总
"""

import json
import shutil

import pandas as pd
import pytest

from conic_bundles import pipeline as pipeline_module
from conic_bundles.cli import run
from conic_bundles.models import VerificationReport

FAST = ["--seed", "7", "--samples", "8"]


@pytest.fixture
def fixture_path(fixtures_dir):
    def _path(name: str) -> str:
        path = fixtures_dir / f"{name}.json"
        if not path.exists():
            path = fixtures_dir / "rejected" / f"{name}.json"
        return str(path)
    return _path


def test_check_passes(fixture_path, capsys):
    assert run(["check", fixture_path("four_ovals"), *FAST]) == 0
    out = capsys.readouterr().out
    assert out.startswith("four_ovals: exit_code=0")


def test_analyze_json_report(fixture_path, capsys):
    assert run(["analyze", fixture_path("four_ovals"), "--json", *FAST]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == "1"
    assert doc["constant_diff"] == ["2", "3"]
    assert doc["real"]["verdict"]["verdict"] == "rational"
    assert doc["exit_code"] == 0


def test_brauer_diff_command(fixture_path, capsys):
    assert run(["brauer-diff", fixture_path("one_oval"), "--json", *FAST]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["constant_diff"] == ["2", "3"]
    assert doc["real"] is None


def test_real_command_ignores_no_real(fixture_path, capsys):
    assert run(["real", fixture_path("empty_curve"), "--json", "--no-real", *FAST]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["real"]["verdict"]["verdict"] == "irrational"


def test_search_flag_enables_the_move(fixture_path, capsys):
    assert run(["verify-z", fixture_path("two_nested"), *FAST]) == 2
    capsys.readouterr()
    assert run(["verify-z", fixture_path("two_nested"), "--search-pgl2", "--json", *FAST]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pgl2"]["source"] == "search"
    assert doc["verification"]["minors"]["checks"]


@pytest.mark.parametrize("name", ["identity", "missing_entry"])
def test_rejected_inputs_exit_2(fixture_path, name):
    assert run(["check", fixture_path(name), *FAST]) == 2


def test_missing_file_exits_2(tmp_path, capsys):
    assert run(["check", str(tmp_path / "absent.json"), "--json"]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["error"]["kind"] == "input_error"


def test_dispatch_failure_exits_2(fixture_path, capsys):
    assert run(["analyze", fixture_path("empty_curve"), "--json", *FAST]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["error"]["kind"] == "dispatch_error"


def test_verification_failure_exits_1(fixture_path, monkeypatch, capsys):
    def broken(pencil, spec):
        report = VerificationReport()
        report.record("discriminant_identity", False, residual={"(0)": "1"})
        return report

    monkeypatch.setattr(pipeline_module, "verify_pencil", broken)
    assert run(["build-z", fixture_path("four_ovals"), "--json", *FAST]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["error"]["details"]["check"] == "discriminant_identity"


def test_usage_errors():
    assert run(["frobnicate", "x.json"]) == 2
    assert run(["check"]) == 2
    assert run(["--help"]) == 0
    assert run(["check", "x.json", "--samples", "0"]) == 2


@pytest.mark.parametrize("argv", [
    ["analyze", "one_oval"],
    ["real", "four_ovals", "--svg"],
    ["analyze", "four_ovals", "--svg"],
])
def test_out_file_is_byte_identical_across_runs(fixture_path, tmp_path, argv):
    command, name, *flags = argv
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run([command, fixture_path(name), "--out", str(first), *flags, *FAST]) == 0
    assert run([command, fixture_path(name), "--out", str(second), *flags, *FAST]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text(encoding="utf-8").endswith("\n")


def test_svg_flag(fixture_path, capsys):
    assert run(["real", fixture_path("four_ovals"), "--json", "--svg", *FAST]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "<svg" in doc["real"]["svg"]


# ============================================
# 批处理
# ============================================

@pytest.fixture
def corpus(tmp_path, fixtures_dir):
    directory = tmp_path / "corpus"
    directory.mkdir()
    for name in ("one_oval", "four_ovals", "empty_curve"):
        shutil.copy(fixtures_dir / f"{name}.json", directory)
    return directory


def test_batch_writes_reports_and_summary(corpus, tmp_path):
    out = tmp_path / "out"
    assert run(["batch", str(corpus), "--out", str(out), "--no-real", *FAST]) == 2
    assert sorted(p.name for p in out.glob("*.json")) == [
        "empty_curve.json", "four_ovals.json", "one_oval.json", "summary.json",
    ]
    table = pd.read_csv(out / "summary.csv", keep_default_na=False)
    assert list(table["instance"]) == ["empty_curve", "four_ovals", "one_oval"]
    assert list(table["exit_code"]) == [2, 0, 0]
    assert list(table["case"]) == ["", "rank3", "rank2"]
    records = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert records[1]["constant_diff"] == "2,3"
    assert records[1]["checks_passed"] is True


def test_parallel_batch_matches_sequential(corpus, tmp_path):
    sequential, parallel = tmp_path / "seq", tmp_path / "par"
    run(["batch", str(corpus), "--out", str(sequential), "--no-real", *FAST])
    run(["batch", str(corpus), "--out", str(parallel), "--no-real", "--jobs", "2", *FAST])
    for name in ("summary.csv", "summary.json", "four_ovals.json"):
        assert (sequential / name).read_bytes() == (parallel / name).read_bytes()


def test_batch_needs_a_directory(tmp_path):
    assert run(["batch", str(tmp_path / "missing"), "--out", str(tmp_path / "out")]) == 2
