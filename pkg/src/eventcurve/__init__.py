"""Two-window event study of yield-curve repricing around policy statements."""

from .calendar import Event, ShockType, TradingCalendar, Window, WindowKind
from .dataset import EventRow, build_event_rows, repricing, sample_summary, stage_correlation
from .estimators import DesignMatrix, FitResult, fit_lasso, fit_ols, fit_ridge, loo_ridge, metrics
from .specs import SPECS, Spec, run_spec, subgroup_fits
from .textfeat import Lexicon, StatementFeatures, load_lexicon, score_statement

__version__ = "0.1.0"

__all__ = [
    "DesignMatrix", "Event", "EventRow", "FitResult", "Lexicon", "SPECS", "ShockType", "Spec",
    "StatementFeatures", "TradingCalendar", "Window", "WindowKind", "build_event_rows", "fit_lasso",
    "fit_ols", "fit_ridge", "load_lexicon", "loo_ridge", "metrics", "repricing", "run_spec",
    "sample_summary", "score_statement", "stage_correlation", "subgroup_fits",
]
