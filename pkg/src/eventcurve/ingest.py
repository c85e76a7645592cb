"""CSV loaders for market data, survey expectations and statement texts."""

from __future__ import annotations

import bisect
import csv
import math
import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Optional

import numpy as np

from .calendar import TradingCalendar
from .errors import BadFilename, DuplicateDate, EmptyDocument, MissingValue, ParseError, UnknownField

DI_FIELDS = ("di_21d", "di_252d", "di_504d")
MARKET_FIELDS = DI_FIELDS + ("fx", "oil", "vix", "cds_5y", "ust_10y")


class DatedPanel:
    """Numeric table keyed by strictly increasing dates.

    Missing cells are stored as NaN and surface as ``None`` / ``MissingValue``
    on access.
    """

    def __init__(self, dates, fields, values):
        dates = tuple(dates)
        fields = tuple(fields)
        values = np.array(values, dtype=float).reshape(len(dates), len(fields))
        for a, b in zip(dates, dates[1:]):
            if not a < b:
                raise ValueError(f"dates must be strictly increasing: {a} then {b}")
        self.dates = dates
        self.fields = fields
        self.values = values
        self.values.setflags(write=False)
        self._row = {d: i for i, d in enumerate(dates)}
        self._col = {f: j for j, f in enumerate(fields)}

    def __len__(self):
        return len(self.dates)

    def __repr__(self):
        return f"{type(self).__name__}(n={len(self.dates)}, fields={list(self.fields)})"

    def _column(self, field):
        try:
            return self._col[field]
        except KeyError:
            raise UnknownField(f"unknown field {field!r}; have {list(self.fields)}") from None

    def get(self, d: date, field: str) -> Optional[float]:
        j = self._column(field)
        i = self._row.get(d)
        if i is None:
            return None
        v = self.values[i, j]
        return None if math.isnan(v) else float(v)

    def require(self, d: date, field: str) -> float:
        v = self.get(d, field)
        if v is None:
            raise MissingValue(f"{field}@{d.isoformat()}")
        return v

    def subset(self, keep) -> "DatedPanel":
        """Rows whose date satisfies ``keep(date)``."""
        mask = [bool(keep(d)) for d in self.dates]
        dates = [d for d, m in zip(self.dates, mask) if m]
        return type(self)(dates, self.fields, self.values[np.array(mask, dtype=bool)])


class MarketPanel(DatedPanel):
    def calendar(self) -> TradingCalendar:
        return TradingCalendar(self.dates)


class ExpectationsPanel(DatedPanel):
    pass


def _read_panel(path, cls, required, positive=()):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file", path, 1)
        header = [h.strip() for h in header]
        if not header or header[0] != "date":
            raise ParseError("first column must be 'date'", path, 1)
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"missing columns {missing}", path, 1)
        if len(set(header)) != len(header):
            raise ParseError("duplicate column names", path, 1)
        fields = header[1:]
        dates, rows, seen = [], [], {}
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, line)
            try:
                d = date.fromisoformat(row[0].strip())
            except ValueError:
                raise ParseError(f"bad ISO date {row[0]!r}", path, line, "date") from None
            if d in seen:
                raise DuplicateDate(f"date {d} already seen on line {seen[d]}", path, line, "date")
            seen[d] = line
            vals = []
            for name, cell in zip(fields, row[1:]):
                cell = cell.strip()
                if not cell:
                    vals.append(math.nan)
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"non-numeric value {cell!r}", path, line, name) from None
                if not math.isfinite(v):
                    raise ParseError(f"non-finite value {cell!r}", path, line, name)
                if name in positive and v <= 0:
                    raise ParseError(f"value must be positive, got {cell!r}", path, line, name)
                vals.append(v)
            dates.append(d)
            rows.append(vals)
    order = sorted(range(len(dates)), key=dates.__getitem__)
    values = np.array([rows[i] for i in order], dtype=float).reshape(len(dates), len(fields))
    return cls([dates[i] for i in order], fields, values)


def load_market(path) -> MarketPanel:
    """Read ``market.csv``. Extra columns are kept as additional fields."""
    return _read_panel(path, MarketPanel, required=("date",) + DI_FIELDS, positive=DI_FIELDS)


def load_expectations(path) -> ExpectationsPanel:
    return _read_panel(path, ExpectationsPanel, required=("date", "selic_year"))


def _fmt(v):
    return "" if math.isnan(v) else repr(float(v))


def write_panel(panel: DatedPanel, path) -> None:
    """Write a panel in the same CSV layout the loaders accept.

    ``repr`` of a float is the shortest string that parses back to the same
    double, so load -> write -> load is bit-exact.
    """
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("date",) + panel.fields)
        for d, row in zip(panel.dates, panel.values):
            w.writerow([d.isoformat()] + [_fmt(v) for v in row])


def asof_merge(exp: ExpectationsPanel, cutoff: date, field: str) -> Optional[float]:
    """Value of ``field`` at the latest publication strictly before ``cutoff``.

    Publications dated on the cutoff itself are excluded. Missing cells are
    skipped in favour of the previous non-missing publication.
    """
    j = exp._column(field)
    i = bisect.bisect_left(exp.dates, cutoff)
    col = exp.values[:, j]
    while i > 0:
        i -= 1
        if not math.isnan(col[i]):
            return float(col[i])
    return None


# -- statements --------------------------------------------------------------

_STATEMENT_NAME = re.compile(r"^(\d{4}-\d{2}-\d{2})\.txt$")


@dataclass(frozen=True)
class StatementDoc:
    statement_date: date
    text: str


def load_statements(directory) -> list[StatementDoc]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"statements directory not found: {directory}")
    docs = []
    for p in sorted(directory.iterdir()):
        if p.is_dir() or p.name.startswith("."):
            continue
        m = _STATEMENT_NAME.match(p.name)
        if not m:
            raise BadFilename(f"{p}: expected YYYY-MM-DD.txt")
        try:
            d = date.fromisoformat(m.group(1))
        except ValueError:
            raise BadFilename(f"{p}: not a valid calendar date") from None
        text = p.read_text(encoding="utf-8")
        if not text.strip():
            raise EmptyDocument(f"{p}: empty statement")
        docs.append(StatementDoc(d, text))
    docs.sort(key=lambda doc: doc.statement_date)
    return docs
