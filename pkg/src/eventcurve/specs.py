"""Named regression specifications over the event table."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .calendar import ShockType
from .errors import EventCurveError, InsufficientSample
from .estimators import (
    DesignMatrix,
    FitResult,
    LASSO,
    OLS_HC3,
    RIDGE,
    RIDGE_LOO,
    fit_lasso,
    fit_ols,
    fit_ridge,
    loo_ridge,
)

DEFAULT_CONTROLS = ("d_fx_shock", "d_vix_shock", "d_cds_shock")
TEXT_REGRESSORS = ("tone", "guidance_score", "uncertainty_level", "uncertainty_change")
EXPECTATION_REGRESSORS = ("selic_year_pre",)
FISCAL = "fiscal"


@dataclass(frozen=True)
class Spec:
    name: str
    label: str
    target: str
    shock: str
    controls: Optional[tuple] = None  # None: use the run-level control set
    text: tuple = TEXT_REGRESSORS
    expectations: tuple = EXPECTATION_REGRESSORS
    fiscal_interaction: bool = False

    def regressors(self, controls: Sequence[str] = DEFAULT_CONTROLS) -> tuple:
        ctrl = tuple(self.controls) if self.controls is not None else tuple(controls)
        cols = (self.shock,) + ctrl + tuple(self.text) + tuple(self.expectations)
        if self.fiscal_interaction:
            cols += (FISCAL, f"{FISCAL}_x_{self.shock}")
        return cols


SPECS = {
    s.name: s
    for s in (
        Spec("di252_baseline", "DI 252d baseline", "d_di252_statement", "d_di252_shock"),
        Spec(
            "di252_fiscal",
            "DI 252d + fiscal interaction",
            "d_di252_statement",
            "d_di252_shock",
            fiscal_interaction=True,
        ),
        Spec("di504_baseline", "DI 504d baseline", "d_di504_statement", "d_di504_shock"),
        Spec("slope_baseline", "Slope 21-504 baseline", "d_slope_statement", "d_slope_shock"),
    )
}
DEFAULT_SPEC_ORDER = ("di252_fiscal", "di252_baseline", "di504_baseline", "slope_baseline")
BASELINE_SPECS = ("di252_baseline", "di504_baseline", "slope_baseline")


def _value(row, name, shock):
    if name == FISCAL:
        return 1.0 if row.shock_type is ShockType.FISCAL else 0.0
    if name == f"{FISCAL}_x_{shock}":
        v = row.get(shock)
        return None if v is None else (v if row.shock_type is ShockType.FISCAL else 0.0)
    return row.get(name)


def design_for(rows, spec: Spec, controls: Sequence[str] = DEFAULT_CONTROLS):
    """Complete-case design for ``spec``; returns (DesignMatrix, kept event ids).

    Rows missing the target or any regressor are left out. Raises
    InsufficientSample when too few rows remain for an identified fit.
    """
    names = spec.regressors(controls)
    y, cols, ids = [], [], []
    for r in rows:
        vals = [_value(r, n, spec.shock) for n in names]
        target = r.get(spec.target)
        if target is None or any(v is None for v in vals):
            continue
        y.append(float(target))
        cols.append([float(v) for v in vals])
        ids.append(r.event_id)
    k = len(names) + 1
    if len(y) <= k:
        raise InsufficientSample(f"{spec.name}: n={len(y)} is not above k={k}")
    X = np.column_stack([np.ones(len(y)), np.array(cols, dtype=float)])
    return DesignMatrix(X, np.array(y), ("const",) + names), ids


@dataclass
class SpecResult:
    spec: Spec
    n: int
    k: int
    fits: dict = field(default_factory=dict)     # estimator tag -> FitResult
    skipped: dict = field(default_factory=dict)  # estimator tag -> reason
    event_ids: list = field(default_factory=list)


def run_spec(
    rows,
    spec,
    controls: Sequence[str] = DEFAULT_CONTROLS,
    ridge_lambda: float = 1.0,
    lasso_lambda: float = 1.0,
    min_obs: int = 0,
) -> SpecResult:
    """OLS-HC3, Ridge, Lasso and Ridge-LOO for one specification.

    A failing estimator is recorded under ``skipped`` and does not stop the
    others.
    """
    if isinstance(spec, str):
        try:
            spec = SPECS[spec]
        except KeyError:
            raise KeyError(f"unknown specification {spec!r}; known: {sorted(SPECS)}") from None
    D, ids = design_for(rows, spec, controls)
    if D.n < min_obs:
        raise InsufficientSample(f"{spec.name}: n={D.n} below minimum {min_obs}")
    out = SpecResult(spec=spec, n=D.n, k=D.k, event_ids=ids)
    runners = (
        (OLS_HC3, lambda: fit_ols(D)),
        (RIDGE, lambda: fit_ridge(D, ridge_lambda)),
        (LASSO, lambda: fit_lasso(D, lasso_lambda)),
        (RIDGE_LOO, lambda: loo_ridge(D, ridge_lambda)),
    )
    for tag, run in runners:
        try:
            out.fits[tag] = run()
        except EventCurveError as exc:
            out.skipped[tag] = f"{type(exc).__name__}: {exc}"
    return out


@dataclass
class SubgroupResult:
    shock_type: ShockType
    n: int
    results: list = field(default_factory=list)  # SpecResult
    skipped_reason: Optional[str] = None

    @property
    def fitted(self) -> bool:
        return self.skipped_reason is None


def subgroup_fits(
    rows,
    min_n: int = 20,
    specs: Sequence = BASELINE_SPECS,
    **kw,
) -> list[SubgroupResult]:
    """Per-shock-type fits for groups with at least ``min_n`` events."""
    out = []
    for st in ShockType:
        group = [r for r in rows if r.shock_type is st]
        if not group:
            continue
        res = SubgroupResult(st, len(group))
        if len(group) < min_n:
            res.skipped_reason = f"n={len(group)} below minimum {min_n}"
            out.append(res)
            continue
        for spec in specs:
            spec = SPECS[spec] if isinstance(spec, str) else spec
            if spec.fiscal_interaction:
                # the indicator is constant inside one shock type
                spec = replace(spec, fiscal_interaction=False)
            try:
                res.results.append(run_spec(group, spec, min_obs=min_n, **kw))
            except InsufficientSample as exc:
                res.results.append(SpecResult(spec=spec, n=len(group), k=0, skipped={"*": str(exc)}))
        out.append(res)
    return out
