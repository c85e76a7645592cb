from datetime import date, timedelta
from pathlib import Path

import pytest

from eventcurve.calendar import TradingCalendar

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


def weekdays(start: date, end: date):
    d, out = start, []
    while d <= end:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


@pytest.fixture
def weekday_calendar():
    # Mon 2024-01-01 .. Fri 2024-03-29
    return TradingCalendar(weekdays(date(2024, 1, 1), date(2024, 3, 29)))


def load_fixture(name):
    """Parsed inputs of a bundled fixture: events, market panel, focus panel, statement features."""
    from eventcurve.calendar import load_events
    from eventcurve.ingest import load_expectations, load_market, load_statements
    from eventcurve.textfeat import load_lexicon, score_corpus

    base = FIXTURES / name
    features = score_corpus(load_statements(base / "statements"), load_lexicon())
    return (load_events(base / "events.csv"), load_market(base / "market.csv"),
            load_expectations(base / "focus.csv"), features)
