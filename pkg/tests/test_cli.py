import csv
import json
import shutil
import subprocess
import sys

import pytest

from conftest import FIXTURES, GOLDEN
from eventcurve.cli import main
from eventcurve.estimators import t_quantile
from eventcurve.report import FIGURE_FILES


def run(*args):
    return main([str(a) for a in args])


def copy_fixture(name, tmp_path):
    dest = tmp_path / name
    shutil.copytree(FIXTURES / name, dest)
    return dest


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("name", ["demo", "small"])
def test_golden_outputs(name, tmp_path):
    out = tmp_path / "out"
    assert run("all", "--config", FIXTURES / name / "run.cfg", "--output", out) == 0
    produced = sorted(p.name for p in out.iterdir())
    assert produced == sorted(p.name for p in (GOLDEN / name).iterdir())
    for fname in produced:
        assert (out / fname).read_bytes() == (GOLDEN / name / fname).read_bytes(), fname


def test_stages_match_all(tmp_path):
    cfg = FIXTURES / "small" / "run.cfg"
    staged = tmp_path / "staged"
    for cmd in ("build", "fit", "figures"):
        assert run(cmd, "--config", cfg, "--output", staged) == 0
    for p in (GOLDEN / "small").iterdir():
        assert (staged / p.name).read_bytes() == p.read_bytes(), p.name


def test_missing_market_file(tmp_path, capsys):
    fx = copy_fixture("small", tmp_path)
    (fx / "market.csv").unlink()
    assert run("build", "--config", fx / "run.cfg") == 2
    assert str(fx / "market.csv") in capsys.readouterr().err


def test_parse_error_names_line(tmp_path, capsys):
    fx = copy_fixture("small", tmp_path)
    lines = (fx / "events.csv").read_text().splitlines()
    lines[3] = lines[3].replace("external", "meteor")
    (fx / "events.csv").write_text("\n".join(lines) + "\n")
    assert run("build", "--config", fx / "run.cfg") == 2
    err = capsys.readouterr().err
    assert "line 4" in err and "events.csv" in err


def test_empty_events_file(tmp_path):
    fx = copy_fixture("small", tmp_path)
    (fx / "events.csv").write_text("id,shock_date,shock_type,prev_statement_date,next_statement_date\n")
    assert run("build", "--config", fx / "run.cfg") == 0
    rows = read_csv(fx / "out" / "events_dataset.csv")
    assert len(rows) == 1 and rows[0][0] == "event_id"


def test_figures_before_fit(tmp_path):
    fx = copy_fixture("small", tmp_path)
    assert run("build", "--config", fx / "run.cfg") == 0
    assert run("figures", "--config", fx / "run.cfg") == 3


def test_fit_before_build(tmp_path):
    fx = copy_fixture("small", tmp_path)
    assert run("fit", "--config", fx / "run.cfg") == 3


def test_bad_config_value(tmp_path):
    fx = copy_fixture("small", tmp_path)
    cfg = fx / "run.cfg"
    cfg.write_text(cfg.read_text().replace("sample_start = 2016-08-31", "sample_start = 31/08/2016"))
    assert run("build", "--config", cfg) == 2


@pytest.fixture(scope="module")
def demo_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    assert run("all", "--config", FIXTURES / "demo" / "run.cfg", "--output", out) == 0
    return out


def test_single_spec_four_rows(tmp_path):
    out = tmp_path / "o"
    assert run("all", "--config", FIXTURES / "demo" / "run.cfg", "--output", out,
               "--spec", "di504_baseline") == 0
    table = read_csv(out / "table2.csv")[1:]
    assert [r[1] for r in table] == ["OLS-HC3", "Ridge", "Lasso", "Ridge LOO"]
    assert {r[0] for r in table} == {"DI 504d baseline"}


def test_lambda_override(tmp_path):
    out = tmp_path / "o"
    assert run("all", "--config", FIXTURES / "demo" / "run.cfg", "--output", out, "--lambda", "5") == 0
    fits = json.loads((out / "fits.json").read_text())
    assert fits["settings"]["ridge_lambda"] == 5.0
    assert all(r["lam"] == 5.0 for r in fits["fits"] if r["estimator"] in ("Ridge", "RidgeLOO"))


def test_figure_headers(demo_out):
    for name, header in FIGURE_FILES.items():
        assert tuple(read_csv(demo_out / name)[0]) == header
    assert len(FIGURE_FILES) == 7


def test_fig4_rows_match_retained(demo_out):
    summary = json.loads((demo_out / "summary.json").read_text())
    assert len(read_csv(demo_out / "fig4_scatter.csv")) - 1 == summary["retained_events"] == 59


def test_figA3_intervals_from_fits(demo_out):
    fits = json.loads((demo_out / "fits.json").read_text())
    rec = next(r for r in fits["fits"] if r["spec"] == "di252_baseline" and r["estimator"] == "OLS-HC3")
    q = float(t_quantile(0.975, rec["n"] - rec["k"]))
    rows = read_csv(demo_out / "figA3_forest.csv")[1:]
    assert [r[0] for r in rows] == list(rec["coefficients"])
    for term, coef, lo, hi in rows:
        b, se = rec["coefficients"][term], rec["se"][term]
        assert float(coef) == pytest.approx(b, rel=1e-11)
        assert float(lo) == pytest.approx(b - q * se, rel=1e-10, abs=1e-9)
        assert float(hi) == pytest.approx(b + q * se, rel=1e-10, abs=1e-9)


def test_only_fiscal_subgroup(demo_out):
    fits = json.loads((demo_out / "fits.json").read_text())
    status = {g["shock_type"]: g["status"] for g in fits["subgroups"]}
    assert status == {"fiscal": "ok", "monetary_policy": "skipped", "external": "skipped", "political": "skipped"}
    terms = {r[0] for r in read_csv(demo_out / "figA2_text_coefs.csv")[1:]}
    assert terms == {"fiscal"}


def test_table2_layout(demo_out):
    rows = read_csv(demo_out / "table2.csv")
    assert rows[0] == ["Specification", "Estimator", "N", "R2", "RMSE", "Sign accuracy (%)"]
    assert len(rows) == 1 + 4 * 4


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "eventcurve", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "build" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "eventcurve", "build", "--config", str(tmp_path / "nope.cfg")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
