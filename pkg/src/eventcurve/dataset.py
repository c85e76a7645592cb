"""One row per event: repricing over both windows plus text and survey data."""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
from collections import Counter
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .calendar import (
    Event,
    ShockType,
    TradingCalendar,
    Window,
    build_shock_window,
    build_statement_window,
)
from .errors import EmptySample, InsufficientData, MissingValue, ParseError, WindowUnavailable, ZeroVariance
from .ingest import ExpectationsPanel, MarketPanel, asof_merge

log = logging.getLogger(__name__)

# how a windowed change is expressed for each market field
PERCENT_RATE = "percent_rate"   # quoted in percent, change reported in bp
BASIS_POINTS = "basis_points"   # already in bp
PERCENT_CHANGE = "percent_change"
LEVEL = "level"

FIELD_UNITS = {
    "di_21d": PERCENT_RATE,
    "di_252d": PERCENT_RATE,
    "di_504d": PERCENT_RATE,
    "ust_10y": PERCENT_RATE,
    "cds_5y": BASIS_POINTS,
    "fx": PERCENT_CHANGE,
    "oil": PERCENT_CHANGE,
    "vix": LEVEL,
}

SLOPE_LONG_MINUS_SHORT = "long_minus_short"
SLOPE_SHORT_MINUS_LONG = "short_minus_long"

CONTROL_SOURCES = {
    "d_fx_shock": "fx",
    "d_oil_shock": "oil",
    "d_vix_shock": "vix",
    "d_cds_shock": "cds_5y",
    "d_ust_shock": "ust_10y",
}

TEXT_FIELDS = ("tone", "guidance_direction", "guidance_explicitness", "guidance_score",
               "uncertainty_level", "uncertainty_change")

DEFAULT_FLOAT_FORMAT = ".12g"


def repricing(panel: MarketPanel, w: Window, field: str) -> float:
    """Change in ``field`` from window start to window end.

    Percent-quoted rates come back in basis points, fx and oil as percent
    changes, everything else as a plain difference.
    """
    start = panel.require(w.start_date, field)
    end = panel.require(w.end_date, field)
    unit = FIELD_UNITS.get(field, LEVEL)
    if unit == PERCENT_RATE:
        return (end - start) * 100.0
    if unit == PERCENT_CHANGE:
        return (end / start - 1.0) * 100.0
    return end - start


@dataclass(frozen=True)
class EventRow:
    event_id: str
    shock_type: ShockType
    shock_date: date
    prev_statement_date: Optional[date]
    next_statement_date: date
    shock_window_start: date
    effective_shock_date: date
    statement_window_end: date
    len_shock_days: int
    len_statement_days: int
    d_di21_shock: float
    d_di252_shock: float
    d_di504_shock: float
    d_slope_shock: float
    d_di21_statement: float
    d_di252_statement: float
    d_di504_statement: float
    d_slope_statement: float
    d_fx_shock: Optional[float] = None
    d_oil_shock: Optional[float] = None
    d_vix_shock: Optional[float] = None
    d_cds_shock: Optional[float] = None
    d_ust_shock: Optional[float] = None
    tone: Optional[float] = None
    guidance_direction: Optional[int] = None
    guidance_explicitness: Optional[float] = None
    guidance_score: Optional[float] = None
    uncertainty_level: Optional[float] = None
    uncertainty_change: Optional[float] = None
    selic_year_pre: Optional[float] = None

    def get(self, name: str):
        return getattr(self, name)


DATASET_COLUMNS = tuple(f.name for f in dataclasses.fields(EventRow))


@dataclass(frozen=True)
class BuildResult:
    rows: list
    drops: list  # (event_id, reason)


def _slope(d_long, d_short, orientation):
    if orientation == SLOPE_LONG_MINUS_SHORT:
        return d_long - d_short
    if orientation == SLOPE_SHORT_MINUS_LONG:
        return d_short - d_long
    raise ValueError(f"unknown slope orientation {orientation!r}")


def _optional_change(panel, w, field):
    if field not in panel.fields:
        return None
    try:
        return repricing(panel, w, field)
    except MissingValue:
        return None


def build_event_row(
    ev: Event,
    cal: TradingCalendar,
    panel: MarketPanel,
    expectations: Optional[ExpectationsPanel],
    statement_features: Mapping,
    slope: str = SLOPE_LONG_MINUS_SHORT,
) -> EventRow:
    """Row for one event; raises WindowUnavailable or MissingValue."""
    w1 = build_shock_window(cal, ev)
    w2 = build_statement_window(cal, ev, w1.end_date)
    di = {}
    for tag, fld in (("21", "di_21d"), ("252", "di_252d"), ("504", "di_504d")):
        di[tag] = (repricing(panel, w1, fld), repricing(panel, w2, fld))
    controls = {name: _optional_change(panel, w1, src) for name, src in CONTROL_SOURCES.items()}
    feats = statement_features.get(ev.next_statement_date)
    text = {f: getattr(feats, f) for f in TEXT_FIELDS} if feats is not None else {}
    selic = None
    if expectations is not None:
        selic = asof_merge(expectations, w1.start_date, "selic_year")
    return EventRow(
        event_id=ev.id,
        shock_type=ev.shock_type,
        shock_date=ev.shock_date,
        prev_statement_date=ev.prev_statement_date,
        next_statement_date=ev.next_statement_date,
        shock_window_start=w1.start_date,
        effective_shock_date=w1.end_date,
        statement_window_end=w2.end_date,
        len_shock_days=w1.length_days,
        len_statement_days=w2.length_days,
        d_di21_shock=di["21"][0],
        d_di252_shock=di["252"][0],
        d_di504_shock=di["504"][0],
        d_slope_shock=_slope(di["504"][0], di["21"][0], slope),
        d_di21_statement=di["21"][1],
        d_di252_statement=di["252"][1],
        d_di504_statement=di["504"][1],
        d_slope_statement=_slope(di["504"][1], di["21"][1], slope),
        selic_year_pre=selic,
        **controls,
        **text,
    )


def build_event_rows(
    events: Iterable[Event],
    cal: TradingCalendar,
    panel: MarketPanel,
    expectations: Optional[ExpectationsPanel],
    statement_features: Mapping,
    sample_start: Optional[date] = None,
    slope: str = SLOPE_LONG_MINUS_SHORT,
) -> BuildResult:
    """Collapse events into rows; failures are logged as drops, never raised."""
    rows, drops = [], []
    for ev in events:
        if sample_start is not None and ev.shock_date < sample_start:
            drops.append((ev.id, "before_sample_start"))
            continue
        try:
            rows.append(build_event_row(ev, cal, panel, expectations, statement_features, slope))
        except WindowUnavailable as exc:
            drops.append((ev.id, f"{exc.kind.value}_window_unavailable"))
        except MissingValue as exc:
            drops.append((ev.id, f"missing_value:{exc}"))
    for ev_id, reason in drops:
        log.info("dropped event %s: %s", ev_id, reason)
    rows.sort(key=lambda r: r.event_id)
    drops.sort(key=lambda d: d[0])
    return BuildResult(rows, drops)


# -- summaries --------------------------------------------------------------------

@dataclass(frozen=True)
class CompositionRow:
    shock_type: ShockType
    count: int
    share: float


def composition(counts: Mapping) -> list[CompositionRow]:
    """Counts and percentage shares per shock type, in enum order."""
    total = sum(counts.values())
    if total == 0:
        raise EmptySample("no events to summarize")
    return [
        CompositionRow(st, counts[st], 100.0 * counts[st] / total)
        for st in ShockType
        if counts.get(st, 0) > 0
    ]


def sample_summary(rows: Sequence[EventRow]) -> list[CompositionRow]:
    if not rows:
        raise EmptySample("no events to summarize")
    return composition(Counter(r.shock_type for r in rows))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    if n != len(y):
        raise ValueError("length mismatch")
    if n < 3:
        raise InsufficientData(f"correlation needs at least 3 pairs, got {n}")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("correlation undefined for a constant series")
    return sxy / math.sqrt(sxx * syy)


def stage_correlation(rows: Sequence[EventRow], field_shock: str, field_statement: str) -> float:
    pairs = [
        (r.get(field_shock), r.get(field_statement))
        for r in rows
        if r.get(field_shock) is not None and r.get(field_statement) is not None
    ]
    return pearson([p[0] for p in pairs], [p[1] for p in pairs])


# -- CSV ---------------------------------------------------------------------------

def format_value(v, float_format: str = DEFAULT_FLOAT_FORMAT) -> str:
    if v is None:
        return ""
    if isinstance(v, ShockType):
        return v.value
    if isinstance(v, date):
        return v.isoformat()
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        s = format(v, float_format)
        return "0" if s == "-0" else s
    return str(v)


def write_dataset(rows: Sequence[EventRow], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DATASET_COLUMNS)
        for r in rows:
            w.writerow([format_value(getattr(r, c)) for c in DATASET_COLUMNS])


def write_drops(drops, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("event_id", "reason"))
        w.writerows(drops)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(EventRow)}


def _parse_cell(name, text):
    text = text.strip()
    kind = _FIELD_TYPES[name]
    if name == "event_id":
        return text
    if name == "shock_type":
        return ShockType(text)
    if not text:
        if "Optional" in kind:
            return None
        raise ValueError("required value is empty")
    if "date" in kind:
        return date.fromisoformat(text)
    if "int" in kind:
        return int(text)
    return float(text)


def read_dataset(path) -> list[EventRow]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != DATASET_COLUMNS:
            raise ParseError("unexpected events_dataset header", path, 1)
        rows = []
        for line, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(rec)}", path, line)
            kw = {}
            for name, cell in zip(header, rec):
                try:
                    kw[name] = _parse_cell(name, cell)
                except ValueError as exc:
                    raise ParseError(str(exc), path, line, name) from None
            rows.append(EventRow(**kw))
    return rows
