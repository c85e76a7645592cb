import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_fixture
from eventcurve.calendar import ShockType, Window, WindowKind, build_windows
from eventcurve.dataset import (
    SLOPE_SHORT_MINUS_LONG,
    EventRow,
    build_event_rows,
    composition,
    read_dataset,
    repricing,
    sample_summary,
    stage_correlation,
    write_dataset,
)
from eventcurve.errors import EmptySample, InsufficientData, MissingValue, ZeroVariance
from eventcurve.ingest import MarketPanel

D1, D2 = date(2024, 1, 2), date(2024, 1, 3)
W = Window(WindowKind.PRE_SHOCK_TO_SHOCK, D1, D2)


def panel(**cols):
    fields = tuple(cols)
    values = np.array([[cols[f][0] for f in fields], [cols[f][1] for f in fields]], dtype=float)
    return MarketPanel((D1, D2), fields, values)


class TestRepricing:
    def test_percent_rate_to_bp(self):
        assert repricing(panel(di_252d=(13.25, 13.50)), W, "di_252d") == pytest.approx(25.0, abs=1e-9)

    def test_unchanged(self):
        assert repricing(panel(di_252d=(13.25, 13.25)), W, "di_252d") == 0.0

    def test_missing_end(self):
        with pytest.raises(MissingValue):
            repricing(panel(di_252d=(13.25, math.nan)), W, "di_252d")

    def test_control_units(self):
        p = panel(fx=(5.0, 5.1), oil=(80.0, 76.0), vix=(15.0, 18.5), cds_5y=(200.0, 212.0), ust_10y=(4.0, 4.1))
        assert repricing(p, W, "fx") == pytest.approx(2.0)
        assert repricing(p, W, "oil") == pytest.approx(-5.0)
        assert repricing(p, W, "vix") == pytest.approx(3.5)
        assert repricing(p, W, "cds_5y") == pytest.approx(12.0)
        assert repricing(p, W, "ust_10y") == pytest.approx(10.0)


@pytest.fixture(scope="module")
def small():
    return load_fixture("small")


@pytest.fixture(scope="module")
def small_result(small):
    events, market, focus, feats = small
    return build_event_rows(events, market.calendar(), market, focus, feats)


class TestBuild:
    def test_small_fixture_drop(self, small_result):
        assert len(small_result.rows) == 11
        assert small_result.drops == [("S07", "missing_value:di_252d@2019-12-12")]

    def test_all_valid(self, small):
        events, market, focus, feats = small
        ok = [e for e in events if e.id != "S07"]
        res = build_event_rows(ok, market.calendar(), market, focus, feats)
        assert len(res.rows) == len(ok) and res.drops == []

    def test_empty(self, small):
        _, market, focus, feats = small
        res = build_event_rows([], market.calendar(), market, focus, feats)
        assert res.rows == [] and res.drops == []

    def test_rows_match_windows(self, small, small_result):
        events, market, focus, feats = small
        cal = market.calendar()
        by_id = {e.id: e for e in events}
        for r in small_result.rows:
            w1, w2 = build_windows(cal, by_id[r.event_id])
            # the two stages partition [w1.start, w2.end]
            assert w1.end_date == w2.start_date == r.effective_shock_date
            assert r.shock_window_start == w1.start_date and r.statement_window_end == w2.end_date
            total = repricing(market, Window(w1.kind, w1.start_date, w2.end_date), "di_252d")
            assert r.d_di252_shock + r.d_di252_statement == pytest.approx(total, abs=1e-9)
            assert r.d_slope_shock == pytest.approx(r.d_di504_shock - r.d_di21_shock, abs=1e-9)
            assert r.d_slope_statement == pytest.approx(r.d_di504_statement - r.d_di21_statement, abs=1e-9)
            assert r.tone == feats[r.next_statement_date].tone
            for f in ("d_di252_shock", "d_di504_shock", "d_di252_statement", "d_di504_statement"):
                assert math.isfinite(r.get(f))

    def test_selic_strictly_before_window(self, small, small_result):
        focus = small[2]
        for r in small_result.rows:
            earlier = [d for d in focus.dates if d < r.shock_window_start]
            assert r.selic_year_pre == focus.get(earlier[-1], "selic_year")

    def test_short_minus_long(self, small):
        events, market, focus, feats = small
        res = build_event_rows(events, market.calendar(), market, focus, feats, slope=SLOPE_SHORT_MINUS_LONG)
        for r in res.rows:
            assert r.d_slope_statement == pytest.approx(r.d_di21_statement - r.d_di504_statement, abs=1e-9)

    def test_missing_text_features_left_empty(self, small):
        events, market, focus, _ = small
        res = build_event_rows(events, market.calendar(), market, None, {})
        assert len(res.rows) == 11
        assert all(r.tone is None and r.selic_year_pre is None for r in res.rows)

    def test_sample_start_logged(self, small):
        events, market, focus, feats = small
        res = build_event_rows(events, market.calendar(), market, focus, feats, sample_start=date(2020, 1, 1))
        assert len(res.rows) == 5
        assert sum(reason == "before_sample_start" for _, reason in res.drops) == 7

    @settings(max_examples=25, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_order_independent(self, small, small_result, rnd):
        events, market, focus, feats = small
        shuffled = list(events)
        rnd.shuffle(shuffled)
        res = build_event_rows(shuffled, market.calendar(), market, focus, feats)
        assert res == small_result

    def test_csv_round_trip(self, small_result, tmp_path):
        p = tmp_path / "ds.csv"
        write_dataset(small_result.rows, p)
        back = read_dataset(p)
        assert [r.event_id for r in back] == [r.event_id for r in small_result.rows]
        for a, b in zip(back, small_result.rows):
            assert a.d_di252_statement == pytest.approx(b.d_di252_statement, rel=1e-11, abs=1e-11)
            assert a.shock_type is b.shock_type and a.len_statement_days == b.len_statement_days


class TestComposition:
    def test_table_shares(self):
        counts = {ShockType.FISCAL: 24, ShockType.MONETARY_POLICY: 16,
                  ShockType.EXTERNAL: 10, ShockType.POLITICAL: 9}
        shares = [round(c.share, 1) for c in composition(counts)]
        assert shares == [40.7, 27.1, 16.9, 15.3]

    def test_single_type(self):
        assert [c.share for c in composition({ShockType.EXTERNAL: 7})] == [100.0]

    def test_two_equal(self):
        assert [c.share for c in composition({ShockType.FISCAL: 2, ShockType.POLITICAL: 2})] == [50.0, 50.0]

    def test_empty(self):
        with pytest.raises(EmptySample):
            sample_summary([])

    @given(st.lists(st.integers(0, 500), min_size=4, max_size=4).filter(lambda c: sum(c) > 0))
    def test_shares_sum(self, counts):
        rows = composition(dict(zip(ShockType, counts)))
        assert abs(sum(r.share for r in rows) - 100.0) < 1e-9


def _two_pass(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y)) / (n - 1)
    vx = sum((a - mx) ** 2 for a in x) / (n - 1)
    vy = sum((b - my) ** 2 for b in y) / (n - 1)
    return cov / math.sqrt(vx * vy)


def _row(x, y):
    return EventRow("E", ShockType.FISCAL, D1, None, D2, D1, D2, D2, 1, 1,
                    0.0, x, 0.0, 0.0, 0.0, y, 0.0, 0.0)


class TestStageCorrelation:
    def test_identity(self):
        rows = [_row(x, x) for x in (1.0, 2.0, 5.0)]
        assert stage_correlation(rows, "d_di252_shock", "d_di252_statement") == pytest.approx(1.0, abs=1e-15)

    def test_negation(self):
        rows = [_row(x, -x) for x in (1.0, 2.0, 5.0)]
        assert stage_correlation(rows, "d_di252_shock", "d_di252_statement") == pytest.approx(-1.0, abs=1e-15)

    def test_fixture_against_two_pass(self, small_result):
        rows = small_result.rows
        got = stage_correlation(rows, "d_di252_shock", "d_di252_statement")
        ref = _two_pass([r.d_di252_shock for r in rows], [r.d_di252_statement for r in rows])
        assert abs(got - ref) < 1e-12

    def test_too_few(self):
        with pytest.raises(InsufficientData):
            stage_correlation([_row(1.0, 2.0)] * 2, "d_di252_shock", "d_di252_statement")

    def test_constant(self):
        with pytest.raises(ZeroVariance):
            stage_correlation([_row(1.0, x) for x in (1.0, 2.0, 3.0)], "d_di252_shock", "d_di252_statement")
