"""Pipeline stages behind the CLI: build the event table, fit, emit figure data.

Every output is a plain CSV or JSON file written with fixed column order
and fixed float formatting so that repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path

import numpy as np

from .calendar import ShockType, load_events
from .config import RunConfig
from .dataset import (
    TEXT_FIELDS,
    build_event_rows,
    format_value,
    read_dataset,
    sample_summary,
    stage_correlation,
    write_dataset,
    write_drops,
)
from .errors import EventCurveError, InsufficientSample, MissingPrerequisite
from .estimators import ESTIMATORS, OLS_HC3, select_ridge_lambda, t_quantile
from .ingest import load_expectations, load_market, load_statements
from .specs import SpecResult, design_for, run_spec, subgroup_fits
from .textfeat import load_lexicon, score_corpus

log = logging.getLogger(__name__)

DATASET_FILE = "events_dataset.csv"
DROPS_FILE = "drops.csv"
FEATURES_FILE = "statement_features.csv"
TABLE1_FILE = "table1.csv"
SUMMARY_FILE = "summary.json"
FITS_FILE = "fits.json"
TABLE2_FILE = "table2.csv"

FIGURE_FILES = {
    "fig2_tone_series.csv": ("date", "tone"),
    "fig3_distributions.csv": ("window_kind", "maturity", "repricing"),
    "fig4_scatter.csv": ("d_di252_shock", "d_di252_statement"),
    "fig5_by_type.csv": ("shock_type", "d_di252_statement"),
    "figA1_rmse.csv": ("spec", "estimator", "rmse"),
    "figA2_text_coefs.csv": ("shock_type", "term", "coefficient"),
    "figA3_forest.csv": ("term", "coefficient", "ci_low", "ci_high"),
}

TABLE2_HEADER = ("Specification", "Estimator", "N", "R2", "RMSE", "Sign accuracy (%)")
ESTIMATOR_LABELS = {"OLS-HC3": "OLS-HC3", "Ridge": "Ridge", "Lasso": "Lasso", "RidgeLOO": "Ridge LOO"}
TEXT_TERMS = ("tone", "guidance_score", "uncertainty_level", "uncertainty_change")


def _require_file(path: Path, what: str):
    if path is None:
        raise FileNotFoundError(f"{what}: path not configured")
    if not Path(path).exists():
        raise FileNotFoundError(f"{what} not found: {path}")


def _writer(path):
    fh = Path(path).open("w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def _num(x, digits=12):
    """JSON-safe float rounded to a fixed number of significant digits."""
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    v = float(format(x, f".{digits}g"))
    return 0.0 if v == 0 else v


def _dump_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


# -- build ------------------------------------------------------------------------

def cmd_build(cfg: RunConfig) -> dict:
    for key in ("events", "market", "focus", "statements"):
        _require_file(getattr(cfg, key), key)
    if cfg.lexicon is not None:
        _require_file(cfg.lexicon, "lexicon")
    events = load_events(cfg.events)
    panel = load_market(cfg.market)
    focus = load_expectations(cfg.focus)
    docs = load_statements(cfg.statements)
    lex = load_lexicon(cfg.lexicon)
    features = score_corpus(docs, lex, cfg.tone_denominator)

    result = build_event_rows(
        events, panel.calendar(), panel, focus, features,
        sample_start=cfg.sample_start, slope=cfg.slope,
    )
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    write_dataset(result.rows, out / DATASET_FILE)
    write_drops(result.drops, out / DROPS_FILE)

    fh, w = _writer(out / FEATURES_FILE)
    with fh:
        w.writerow(("statement_date",) + TEXT_FIELDS)
        for d in sorted(features):
            f = features[d]
            w.writerow([d.isoformat()] + [format_value(getattr(f, k)) for k in TEXT_FIELDS])

    fh, w = _writer(out / TABLE1_FILE)
    with fh:
        w.writerow(("Shock type", "Events", "Share (%)"))
        if result.rows:
            for c in sample_summary(result.rows):
                w.writerow((c.shock_type.label, c.count, f"{c.share:.1f}"))

    eligible = sum(1 for ev in events if ev.shock_date >= cfg.sample_start)
    correlations = {}
    for name, (a, b) in {
        "di252": ("d_di252_shock", "d_di252_statement"),
        "di504": ("d_di504_shock", "d_di504_statement"),
        "slope": ("d_slope_shock", "d_slope_statement"),
    }.items():
        try:
            correlations[name] = _num(stage_correlation(result.rows, a, b))
        except EventCurveError:
            correlations[name] = None
    summary = {
        "raw_events": len(events),
        "eligible_events": eligible,
        "retained_events": len(result.rows),
        "sample_start": cfg.sample_start.isoformat(),
        "drop_reasons": _count_reasons(result.drops),
        "composition": [
            {"shock_type": c.shock_type.value, "count": c.count, "share": _num(c.share)}
            for c in (sample_summary(result.rows) if result.rows else [])
        ],
        "stage_correlation": correlations,
        "median_window_days": _median_lengths(result.rows),
    }
    _dump_json(summary, out / SUMMARY_FILE)
    log.info("built %d rows, %d drops", len(result.rows), len(result.drops))
    return summary


def _count_reasons(drops):
    counts = {}
    for _, reason in drops:
        key = reason.split(":", 1)[0]
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


def _median_lengths(rows):
    if not rows:
        return None
    med = {
        "pre_shock_to_shock": _num(np.median([r.len_shock_days for r in rows])),
        "shock_to_statement": _num(np.median([r.len_statement_days for r in rows])),
    }
    mp = [r.len_statement_days for r in rows if r.shock_type is ShockType.MONETARY_POLICY]
    med["shock_to_statement_monetary_policy"] = _num(np.median(mp)) if mp else None
    return med


# -- fit --------------------------------------------------------------------------

def _load_rows(cfg: RunConfig):
    path = Path(cfg.output) / DATASET_FILE
    if not path.exists():
        raise MissingPrerequisite(f"{path} not found; run `eventcurve build` first")
    return read_dataset(path)


def _fit_record(spec, tag, fit=None, reason=None, n=None, k=None):
    rec = {
        "spec": spec.name,
        "label": spec.label,
        "estimator": tag,
        "status": "ok" if fit is not None else "skipped",
        "reason": reason,
        "n": n,
        "k": k,
    }
    if fit is None:
        rec.update(r2=None, rmse=None, sign_accuracy=None, df_resid=None, lam=None,
                   coefficients=None, se=None, p_values=None)
        return rec
    names = list(fit.column_names)
    rec.update(
        r2=_num(fit.r2),
        rmse=_num(fit.rmse),
        sign_accuracy=_num(fit.sign_accuracy),
        df_resid=fit.df_resid,
        lam=_num(fit.lam),
        coefficients={c: _num(v) for c, v in zip(names, fit.coefficients)},
        se={c: _num(v) for c, v in zip(names, fit.hc3_se)} if fit.hc3_se is not None else None,
        p_values={c: _num(v) for c, v in zip(names, fit.p_values)} if fit.p_values is not None else None,
    )
    return rec


def _spec_records(sr: SpecResult):
    recs = []
    for tag in ESTIMATORS:
        if tag in sr.fits:
            recs.append(_fit_record(sr.spec, tag, sr.fits[tag], n=sr.n, k=sr.k))
        else:
            reason = sr.skipped.get(tag) or sr.skipped.get("*")
            recs.append(_fit_record(sr.spec, tag, reason=reason, n=sr.n or None, k=sr.k or None))
    return recs


def _ridge_lambda(cfg, rows, spec):
    if not cfg.ridge_grid:
        return cfg.ridge_lambda
    D, _ = design_for(rows, spec, cfg.controls)
    return select_ridge_lambda(D, cfg.ridge_grid)


def cmd_fit(cfg: RunConfig) -> dict:
    rows = _load_rows(cfg)
    out = Path(cfg.output)
    records = []
    for name in cfg.specs:
        spec = cfg.spec(name)
        try:
            lam = _ridge_lambda(cfg, rows, spec)
            sr = run_spec(rows, spec, controls=cfg.controls, ridge_lambda=lam,
                          lasso_lambda=cfg.lasso_lambda)
        except InsufficientSample as exc:
            sr = SpecResult(spec=spec, n=0, k=0, skipped={"*": f"InsufficientSample: {exc}"})
        records.extend(_spec_records(sr))

    subgroups = []
    for g in subgroup_fits(rows, min_n=cfg.min_n, controls=cfg.controls,
                           ridge_lambda=cfg.ridge_lambda, lasso_lambda=cfg.lasso_lambda):
        entry = {
            "shock_type": g.shock_type.value,
            "n": g.n,
            "status": "ok" if g.fitted else "skipped",
            "reason": g.skipped_reason,
            "fits": [rec for sr in g.results for rec in _spec_records(sr)],
        }
        subgroups.append(entry)

    doc = {
        "settings": {
            "ridge_lambda": _num(cfg.ridge_lambda),
            "ridge_grid": [_num(x) for x in cfg.ridge_grid] if cfg.ridge_grid else None,
            "lasso_lambda": _num(cfg.lasso_lambda),
            "min_n": cfg.min_n,
            "controls": list(cfg.controls),
            "slope": cfg.slope,
        },
        "fits": records,
        "subgroups": subgroups,
    }
    _dump_json(doc, out / FITS_FILE)

    fh, w = _writer(out / TABLE2_FILE)
    with fh:
        w.writerow(TABLE2_HEADER)
        for rec in records:
            ok = rec["status"] == "ok"
            w.writerow((
                rec["label"],
                ESTIMATOR_LABELS[rec["estimator"]],
                rec["n"] if ok else "",
                f"{rec['r2']:.3f}" if ok else "",
                f"{rec['rmse']:.1f}" if ok else "",
                f"{rec['sign_accuracy']:.1f}" if ok else "",
            ))
    return doc


# -- figures ------------------------------------------------------------------------

def _read_features(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def cmd_figures(cfg: RunConfig) -> list:
    out = Path(cfg.output)
    for name in (DATASET_FILE, FEATURES_FILE, FITS_FILE):
        if not (out / name).exists():
            raise MissingPrerequisite(f"{out / name} not found; run `eventcurve build` and `eventcurve fit` first")
    rows = read_dataset(out / DATASET_FILE)
    features = _read_features(out / FEATURES_FILE)
    fits = json.loads((out / FITS_FILE).read_text(encoding="utf-8"))

    bodies = {name: [] for name in FIGURE_FILES}
    for f in features:
        bodies["fig2_tone_series.csv"].append((f["statement_date"], f["tone"]))
    for kind, suffix in (("pre_shock_to_shock", "shock"), ("shock_to_statement", "statement")):
        for maturity, col in (("di_252d", "d_di252"), ("di_504d", "d_di504")):
            for r in rows:
                bodies["fig3_distributions.csv"].append(
                    (kind, maturity, format_value(r.get(f"{col}_{suffix}")))
                )
    for r in rows:
        bodies["fig4_scatter.csv"].append((format_value(r.d_di252_shock), format_value(r.d_di252_statement)))
        bodies["fig5_by_type.csv"].append((r.shock_type.value, format_value(r.d_di252_statement)))
    for rec in fits["fits"]:
        if rec["status"] == "ok":
            bodies["figA1_rmse.csv"].append((rec["spec"], rec["estimator"], format_value(rec["rmse"])))
    for g in fits["subgroups"]:
        for rec in g["fits"]:
            if rec["status"] == "ok" and rec["estimator"] == OLS_HC3 and rec["spec"] == "di252_baseline":
                for term in TEXT_TERMS:
                    if term in rec["coefficients"]:
                        bodies["figA2_text_coefs.csv"].append(
                            (g["shock_type"], term, format_value(rec["coefficients"][term]))
                        )
    for rec in fits["fits"]:
        if rec["status"] == "ok" and rec["estimator"] == OLS_HC3 and rec["spec"] == "di252_baseline":
            q = float(t_quantile(0.975, rec["df_resid"]))
            for term, coef in rec["coefficients"].items():
                se = rec["se"][term]
                bodies["figA3_forest.csv"].append(
                    (term, format_value(coef), format_value(coef - q * se), format_value(coef + q * se))
                )
    written = []
    for name, header in FIGURE_FILES.items():
        fh, w = _writer(out / name)
        with fh:
            w.writerow(header)
            w.writerows(bodies[name])
        written.append(out / name)
    return written


def cmd_all(cfg: RunConfig):
    cmd_build(cfg)
    cmd_fit(cfg)
    return cmd_figures(cfg)
