import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from hardylab.cli import dumps, emit, main
from hardylab.scenario import ConfigError, parse_config, parse_literal, run_scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, text, name="s.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# --- literals and parsing --------------------------------------------------


@pytest.mark.parametrize("text,value", [
    ("1/2", 0.5),
    ("polar(1, pi/2)", 1j),
    ("sqrt(2)/2 + sqrt(2)/2*j", complex(math.sqrt(0.5), math.sqrt(0.5))),
    ([0.25, -1], 0.25 - 1j),
    (3, 3),
])
def test_parse_literal(text, value):
    assert abs(parse_literal(text) - value) < 1e-15


def test_polar_literal_is_unimodular():
    assert abs(abs(parse_literal("polar(1, pi/7)")) - 1) < 1e-15


@pytest.mark.parametrize("bad", ["__import__('os')", "1 +", "foo(1)", "[1, 2]"])
def test_parse_literal_rejects(bad):
    with pytest.raises(ValueError):
        parse_literal(bad)


BASE = '[domain]\nkind = "disk"\n\n[symbol]\nkind = "monomial"\nk = 2\n'


def test_unknown_key_reports_line(tmp_path, capsys):
    path = write(tmp_path, BASE + "\n[run]\np = 2\ndiagnostcs = [\"norm\"]\n")
    assert main(["run", path]) == 2
    err = capsys.readouterr().err
    assert "s.toml:10" in err and "diagnostcs" in err


def test_kappa_checked_at_parse_time(tmp_path, capsys):
    text = BASE + '\n[coefficient]\nfield = "nu"\nfamily = "constant"\nkappa = 1.0\n'
    assert main(["run", write(tmp_path, text)]) == 2
    assert "kappa" in capsys.readouterr().err
    with pytest.raises(ConfigError):
        parse_config(text)


def test_symbol_domain_mismatch(tmp_path):
    text = '[domain]\nkind = "disk"\n\n[symbol]\nkind = "inversion"\nmu = 1\n'
    assert main(["run", write(tmp_path, text)]) == 2


@pytest.mark.parametrize("extra", ['[run]\np = 1\n', '[grid]\nn_theta = 100\n', '[tolerances]\nnope = 1\n',
                                   '[mystery]\n'])
def test_invalid_values(extra):
    with pytest.raises(ConfigError):
        parse_config(BASE + "\n" + extra)


def test_missing_config_file(tmp_path):
    assert main(["run", str(tmp_path / "absent.toml")]) == 2


# --- scenarios -------------------------------------------------------------


def test_scenario_square_isometry():
    rep = run_scenario(parse_config(BASE + '\n[run]\ndiagnostics = ["isometry"]\n'))
    assert rep["status"] == "ok"
    assert rep["diagnostics"]["isometry"]["report"]["verdicts"]["main"] is True


def test_scenario_annulus_rotation():
    text = ('[domain]\nkind = "annulus"\nr0 = 0.5\n\n[symbol]\nkind = "rotation"\nlam = "polar(1, pi/7)"\n\n'
            '[run]\ndiagnostics = ["isometry", "omega"]\n')
    rep = run_scenario(parse_config(text))
    d = rep["diagnostics"]
    assert d["isometry"]["report"]["verdicts"]["main"] is True
    assert d["omega"]["report"]["verdicts"]["main"] == "Case1"
    assert rep["order"] == ["isometry", "omega"]


def test_scenario_moebius_bound():
    text = ('[domain]\nkind = "disk"\n\n[symbol]\nkind = "moebius"\na = "0.3"\n\n'
            '[run]\ndiagnostics = ["norm"]\ntrials = 5\n')
    cert = run_scenario(parse_config(text))["diagnostics"]["norm"]["report"]["certificates"]
    assert cert["estimate"] <= cert["bound"] + 1e-6


def test_failure_is_recorded_and_run_continues():
    # omega needs an annulus symbol: that diagnostic errors, the rest still runs
    rep = run_scenario(parse_config(BASE + '\n[run]\ndiagnostics = ["omega", "invertibility"]\n'))
    assert rep["diagnostics"]["omega"]["status"] == "error"
    assert rep["diagnostics"]["invertibility"]["status"] == "ok"
    assert rep["failures"] == ["omega"] and rep["status"] == "failed"


def test_report_carries_tolerances_and_config():
    rep = run_scenario(parse_config(BASE + '\n[run]\ndiagnostics = ["isometry"]\n'))
    assert rep["diagnostics"]["isometry"]["report"]["tolerances"]
    assert rep["config"]["symbol"]["kind"] == "monomial"
    assert "version" in rep["tool"]


def test_determinism():
    cfg = parse_config(BASE + '\n[run]\ndiagnostics = ["isometry", "norm", "compact"]\ntrials = 4\n')
    assert dumps(run_scenario(cfg), timings=False) == dumps(run_scenario(cfg), timings=False)


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.toml")))
def test_shipped_configs_run(name, capsys):
    assert main(["run", str(CONFIGS / name)]) == 0
    json.loads(capsys.readouterr().out)


# --- emit ------------------------------------------------------------------


@pytest.fixture(scope="module")
def demo_report():
    text = ('[domain]\nkind = "disk"\n\n[symbol]\nkind = "general"\ncoeffs = { "1" = "1/2" }\n\n'
            '[run]\ndiagnostics = ["compact", "eval"]\n')
    return run_scenario(parse_config(text))


def test_emit_json_round_trip(tmp_path, demo_report):
    (path,) = emit(demo_report, "json", str(tmp_path))
    again = json.loads(Path(path).read_text())
    assert again == json.loads(dumps(demo_report))
    assert dumps(again) == dumps(demo_report)


def test_emit_csv(tmp_path, demo_report):
    (path,) = emit(demo_report, "csv", str(tmp_path))
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["diagnostic", "certificate", "value"]
    assert ("compact", "verdict.main", "compact-like") in {tuple(r) for r in rows}


def test_emit_plot_data(tmp_path, demo_report):
    paths = emit(demo_report, "plot-data", str(tmp_path))
    names = {Path(p).name for p in paths}
    assert {"compact_singular_values.csv", "eval_sweep.csv"} <= names
    sv = list(csv.DictReader(open(tmp_path / "compact_singular_values.csv")))
    col = np.array([float(r["singular_values"]) for r in sv])
    assert col.size == 64 and np.all(np.diff(col) < 0)
    assert np.allclose(col, 0.5 ** np.arange(64), rtol=1e-10, atol=0)
    sweep = list(csv.DictReader(open(tmp_path / "eval_sweep.csv")))
    assert np.all(np.diff([float(r["norm"]) for r in sweep]) > 0)


def test_emit_from_saved_report(tmp_path, demo_report, capsys):
    (path,) = emit(demo_report, "json", str(tmp_path / "a"))
    assert main(["emit", "--report", path, "--format", "csv", "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "b" / "report.csv").exists()


def test_emit_unwritable(tmp_path, demo_report):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit(demo_report, "json", str(blocker / "sub"))


def test_selftest_subset(capsys):
    assert main(["selftest", "--only", "1,4"]) == 0
    out = capsys.readouterr().out
    assert "criterion  1 [PASS]" in out and "2/2 criteria passed" in out
