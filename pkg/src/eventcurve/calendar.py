"""Trading-day calendar and the two event windows.

The calendar is simply the set of dates on which the market panel has a
row. No holiday tables are consulted.
"""

from __future__ import annotations

import bisect
import csv
import enum
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import NoTradingDate, ParseError, WindowUnavailable

DEFAULT_SAMPLE_START = date(2016, 8, 31)


class ShockType(enum.Enum):
    FISCAL = "fiscal"
    MONETARY_POLICY = "monetary_policy"
    EXTERNAL = "external"
    POLITICAL = "political"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    ShockType.FISCAL: "Fiscal",
    ShockType.MONETARY_POLICY: "Monetary Policy/Copom",
    ShockType.EXTERNAL: "External",
    ShockType.POLITICAL: "Political",
}


class WindowKind(enum.Enum):
    PRE_SHOCK_TO_SHOCK = "pre_shock_to_shock"
    SHOCK_TO_STATEMENT = "shock_to_statement"


class TradingCalendar:
    """Ordered, duplicate-free sequence of trading dates."""

    def __init__(self, dates: Iterable[date]):
        dates = tuple(dates)
        for a, b in zip(dates, dates[1:]):
            if not a < b:
                raise ValueError(f"trading dates must be strictly increasing: {a} then {b}")
        self.dates = dates
        self._members = frozenset(dates)

    def __len__(self):
        return len(self.dates)

    def __contains__(self, d):
        return d in self._members

    def __repr__(self):
        if not self.dates:
            return "TradingCalendar([])"
        return f"TradingCalendar({self.dates[0]}..{self.dates[-1]}, n={len(self.dates)})"

    def _require_nonempty(self):
        if not self.dates:
            raise NoTradingDate("trading calendar is empty")


@dataclass(frozen=True)
class Event:
    id: str
    shock_date: date
    shock_type: ShockType
    next_statement_date: date
    prev_statement_date: Optional[date] = None

    def __post_init__(self):
        if self.shock_date > self.next_statement_date:
            raise ValueError(
                f"event {self.id}: shock_date {self.shock_date} is after "
                f"next_statement_date {self.next_statement_date}"
            )


@dataclass(frozen=True)
class Window:
    kind: WindowKind
    start_date: date
    end_date: date

    @property
    def length_days(self) -> int:
        return (self.end_date - self.start_date).days


def last_trading_on_or_before(cal: TradingCalendar, d: date) -> date:
    cal._require_nonempty()
    i = bisect.bisect_right(cal.dates, d)
    if i == 0:
        raise NoTradingDate(f"no trading date on or before {d}")
    return cal.dates[i - 1]


def last_trading_strictly_before(cal: TradingCalendar, d: date) -> date:
    cal._require_nonempty()
    i = bisect.bisect_left(cal.dates, d)
    if i == 0:
        raise NoTradingDate(f"no trading date before {d}")
    return cal.dates[i - 1]


def first_trading_on_or_after(cal: TradingCalendar, d: date) -> date:
    cal._require_nonempty()
    i = bisect.bisect_left(cal.dates, d)
    if i == len(cal.dates):
        raise NoTradingDate(f"no trading date on or after {d}")
    return cal.dates[i]


def first_trading_strictly_after(cal: TradingCalendar, d: date) -> date:
    cal._require_nonempty()
    i = bisect.bisect_right(cal.dates, d)
    if i == len(cal.dates):
        raise NoTradingDate(f"no trading date after {d}")
    return cal.dates[i]


def build_shock_window(cal: TradingCalendar, ev: Event) -> Window:
    """Last trading day before the shock to the first one on or after it.

    The window end is the effective shock date.
    """
    try:
        start = last_trading_strictly_before(cal, ev.shock_date)
        end = first_trading_on_or_after(cal, ev.shock_date)
    except NoTradingDate as exc:
        raise WindowUnavailable(
            f"event {ev.id}: shock window unavailable ({exc})", WindowKind.PRE_SHOCK_TO_SHOCK
        ) from exc
    return Window(WindowKind.PRE_SHOCK_TO_SHOCK, start, end)


def build_statement_window(cal: TradingCalendar, ev: Event, effective_shock: date) -> Window:
    """Effective shock date to the first trading day strictly after the statement.

    Statements are released after the close, so the strict-after roll also
    covers the case where the shock and the statement share a calendar date.
    """
    if effective_shock not in cal:
        raise ValueError(f"effective shock date {effective_shock} is not a trading date")
    try:
        end = first_trading_strictly_after(cal, ev.next_statement_date)
    except NoTradingDate as exc:
        raise WindowUnavailable(
            f"event {ev.id}: statement window unavailable ({exc})", WindowKind.SHOCK_TO_STATEMENT
        ) from exc
    if end <= effective_shock:
        raise WindowUnavailable(f"event {ev.id}: statement window has no length", WindowKind.SHOCK_TO_STATEMENT)
    return Window(WindowKind.SHOCK_TO_STATEMENT, effective_shock, end)


def build_windows(cal: TradingCalendar, ev: Event) -> tuple[Window, Window]:
    w1 = build_shock_window(cal, ev)
    return w1, build_statement_window(cal, ev, w1.end_date)


def filter_sample(events: Sequence[Event], start: date = DEFAULT_SAMPLE_START):
    """Split events into (kept, dropped) on the sample start date."""
    kept = [ev for ev in events if ev.shock_date >= start]
    dropped = [ev for ev in events if ev.shock_date < start]
    return kept, dropped


# -- events file -------------------------------------------------------------

EVENT_COLUMNS = ("id", "shock_date", "shock_type", "prev_statement_date", "next_statement_date")


def _parse_date(text, path, line, column, required=True):
    text = text.strip()
    if not text:
        if required:
            raise ParseError("missing date", path, line, column)
        return None
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise ParseError(f"bad ISO date {text!r}", path, line, column) from None


def load_events(path) -> list[Event]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        header = [h.strip() for h in header]
        missing = [c for c in EVENT_COLUMNS if c not in header]
        if missing:
            raise ParseError(f"missing columns {missing}", path, 1)
        idx = {name: header.index(name) for name in EVENT_COLUMNS}
        events = []
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, line)
            ev_id = row[idx["id"]].strip()
            if not ev_id:
                raise ParseError("empty event id", path, line, "id")
            raw_type = row[idx["shock_type"]].strip()
            try:
                shock_type = ShockType(raw_type)
            except ValueError:
                raise ParseError(f"unknown shock_type {raw_type!r}", path, line, "shock_type") from None
            try:
                events.append(
                    Event(
                        id=ev_id,
                        shock_date=_parse_date(row[idx["shock_date"]], path, line, "shock_date"),
                        shock_type=shock_type,
                        prev_statement_date=_parse_date(
                            row[idx["prev_statement_date"]], path, line, "prev_statement_date", required=False
                        ),
                        next_statement_date=_parse_date(
                            row[idx["next_statement_date"]], path, line, "next_statement_date"
                        ),
                    )
                )
            except ValueError as exc:
                raise ParseError(str(exc), path, line) from None
    return events
