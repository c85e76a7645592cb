"""Regenerate the synthetic fixtures under ``fixtures/``.

Deterministic (fixed seeds). The committed files are the source of truth
for tests; rerun this only when the fixture design changes, then refresh
the golden outputs with ``tools/refresh_golden.py``.

demo/   75 raw events, 60 on/after 2016-08-31, 59 with both windows;
        retained composition 24 fiscal / 16 monetary policy / 10 external /
        9 political.
small/  12 events inside 2019-2020; one event's statement-window end has a
        blank di_252d cell, so 11 rows survive.
"""

from __future__ import annotations

import bisect
import csv
import shutil
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from eventcurve.calendar import ShockType
from eventcurve.ingest import StatementDoc
from eventcurve.textfeat import load_lexicon, score_corpus

ROOT = Path(__file__).resolve().parents[1] / "fixtures"

FIXED_HOLIDAYS = ((1, 1), (4, 21), (5, 1), (9, 7), (10, 12), (11, 2), (11, 15), (12, 25))

HAWK_SENTENCES = [
    "Inflation remains elevated and inflationary pressures are persistent.",
    "The Committee judges that upside risks to inflation have increased.",
    "Inflation expectations show signs of de-anchoring, which requires vigilance.",
    "The Copom decided to raise the Selic rate to {rate} percent.",
    "Monetary policy must remain contractionary for a prolonged period.",
    "A política monetária deve seguir contracionista diante de pressões inflacionárias.",
]
DOVE_SENTENCES = [
    "The disinflation process continues and core inflation shows moderation.",
    "The Committee decided to reduce the Selic rate to {rate} percent.",
    "Downside risks to inflation have become more relevant given economic slack.",
    "Inflation dynamics remain benign, allowing an accommodative monetary policy.",
    "A desinflação prossegue e os riscos baixistas para a inflação aumentaram.",
]
NEUTRAL_SENTENCES = [
    "The Committee decided to maintain the Selic rate at {rate} percent.",
    "Inflation expectations are in line with the inflation target.",
    "The balance of risks for inflation is balanced.",
    "O Comitê decidiu manter a taxa Selic em {rate} por cento.",
]
OUT_OF_SCOPE_SENTENCES = [
    "Global activity indicators were mixed over the period.",
    "Commodity markets displayed heterogeneous movements.",
    "The labor market continued to recover gradually.",
    "Members discussed the external environment in detail.",
]
UNCERTAINTY_SENTENCES = [
    "The fiscal outlook raises uncertainty about the path of inflation.",
    "Volatility in global markets adds uncertainty to inflation expectations.",
]
GUIDANCE_TIGHTEN = [
    "The Committee anticipates a further adjustment of the same magnitude at its next meeting.",
    "The Committee sees room for a further adjustment in the policy rate.",
]
GUIDANCE_EASE = [
    "The Committee anticipates further reductions of the same magnitude in the next meetings.",
    "Further easing of the policy rate may be appropriate.",
]


def business_days(start: date, end: date, rng) -> list[date]:
    days = []
    d = start
    while d <= end:
        if d.weekday() < 5 and (d.month, d.day) not in FIXED_HOLIDAYS:
            days.append(d)
        d += timedelta(days=1)
    # a few random market closures
    drop = set(rng.choice(len(days), size=len(days) // 250, replace=False).tolist())
    return [d for i, d in enumerate(days) if i not in drop or d.weekday() == 2]


def statement_dates(first: date, last: date, trading: set) -> list[date]:
    out = []
    d = last
    step = 0
    while d >= first:
        while d not in trading:
            d -= timedelta(days=7)
        out.append(d)
        d -= timedelta(days=42 if step % 2 else 49)
        step += 1
    return sorted(out)


def policy_stance(d: date) -> float:
    """Hawkishness in [-1, 1] by period; loosely mimics a policy cycle."""
    y = d.year + (d.timetuple().tm_yday - 1) / 365.0
    if y < 2016.9:
        return 0.6
    if y < 2020.8:
        return -0.6
    if y < 2022.8:
        return 0.8
    if y < 2023.6:
        return 0.2
    if y < 2024.6:
        return -0.4
    return 0.5


def make_statement(rng, stance: float, rate: float) -> str:
    p_hawk = 0.25 + 0.35 * max(stance, 0)
    p_dove = 0.25 + 0.35 * max(-stance, 0)
    sentences = []
    for _ in range(int(rng.integers(5, 9))):
        u = rng.random()
        if u < p_hawk:
            pool = HAWK_SENTENCES
        elif u < p_hawk + p_dove:
            pool = DOVE_SENTENCES
        elif u < p_hawk + p_dove + 0.2:
            pool = NEUTRAL_SENTENCES
        else:
            pool = OUT_OF_SCOPE_SENTENCES
        sentences.append(pool[int(rng.integers(len(pool)))])
    for _ in range(int(rng.integers(0, 3))):
        sentences.insert(int(rng.integers(len(sentences) + 1)),
                         UNCERTAINTY_SENTENCES[int(rng.integers(len(UNCERTAINTY_SENTENCES)))])
    g = rng.random()
    if stance > 0.3 and g < 0.7:
        sentences.append(GUIDANCE_TIGHTEN[int(rng.integers(2))])
    elif stance < -0.3 and g < 0.7:
        sentences.append(GUIDANCE_EASE[int(rng.integers(2))])
    text = " ".join(sentences).replace("{rate}", f"{rate:.2f}")
    # wrap for readability
    words, lines, cur = text.split(), [], ""
    for w in words:
        if len(cur) + len(w) + 1 > 76:
            lines.append(cur)
            cur = w
        else:
            cur = f"{cur} {w}".strip()
    lines.append(cur)
    return "\n".join(lines) + "\n"


def simulate_market(rng, days, statements, features, shocks):
    """Daily panel; statement days carry a planted response to the text."""
    n = len(days)
    idx = {d: i for i, d in enumerate(days)}
    selic = np.empty(n)
    rate = 14.25
    s_iter = iter(sorted(statements))
    next_s = next(s_iter, None)
    for i, d in enumerate(days):
        if next_s is not None and d > next_s:
            stance = policy_stance(next_s)
            rate = float(np.clip(rate + 0.5 * round(stance * 1.2), 2.0, 15.0))
            next_s = next(s_iter, None)
        selic[i] = rate
    eps21 = rng.normal(0, 0.01, n)
    eps252 = rng.normal(0, 0.045, n)
    eps504 = rng.normal(0, 0.06, n)
    jump252 = np.zeros(n)
    jump504 = np.zeros(n)
    jump21 = np.zeros(n)
    for s in statements:
        f = features[s]
        j = idx.get(s)
        if j is None or j + 1 >= n:
            continue
        # first trading day after the evening release
        k = j + 1
        jump252[k] += 0.30 * f.tone + 0.12 * f.guidance_score + rng.normal(0, 0.08)
        jump504[k] += 0.15 * f.tone + 0.06 * f.guidance_score + rng.normal(0, 0.10)
        jump21[k] += 0.05 * f.tone
    for d, size in shocks:
        k = idx[d]
        jump252[k] += size
        jump504[k] += 1.2 * size
        jump21[k] += 0.3 * size
    tp252 = 0.4 + np.cumsum(eps252 + jump252) * 0.5
    tp504 = 0.8 + np.cumsum(eps504 + jump504) * 0.5
    di21 = selic - 0.10 + np.cumsum(eps21 + jump21) * 0.3
    di252 = np.maximum(di21 + tp252 - 0.5 * (tp252.mean() - 0.4), 1.0)
    di504 = np.maximum(di252 + tp504 - tp252, 1.0)
    di21 = np.maximum(di21, 1.0)
    fx = 3.2 * np.exp(np.cumsum(rng.normal(0.0002, 0.009, n)))
    oil = 55.0 * np.exp(np.cumsum(rng.normal(0.0, 0.02, n)))
    vix = np.empty(n)
    vix[0] = 16.0
    for i in range(1, n):
        vix[i] = max(9.0, vix[i - 1] + 0.05 * (17.0 - vix[i - 1]) + rng.normal(0, 1.2))
    cds = np.empty(n)
    cds[0] = 300.0
    for i in range(1, n):
        cds[i] = max(80.0, cds[i - 1] + 0.01 * (220.0 - cds[i - 1]) + rng.normal(0, 4.0))
    ust = np.maximum(0.5, 2.2 + np.cumsum(rng.normal(0, 0.04, n)))
    return {
        "di_21d": np.round(di21, 4),
        "di_252d": np.round(di252, 4),
        "di_504d": np.round(di504, 4),
        "fx": np.round(fx, 4),
        "oil": np.round(oil, 2),
        "vix": np.round(vix, 2),
        "cds_5y": np.round(cds, 2),
        "ust_10y": np.round(ust, 3),
    }, selic


def write_market(path, days, cols, blank=()):
    names = ["di_21d", "di_252d", "di_504d", "fx", "oil", "vix", "cds_5y", "ust_10y"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date"] + names)
        for i, d in enumerate(days):
            row = [d.isoformat()]
            for nme in names:
                row.append("" if (d, nme) in blank else format(float(cols[nme][i]), "g"))
            w.writerow(row)


def write_focus(path, days, selic, rng):
    start, end = days[0], days[-1]
    d = start + timedelta(days=(4 - start.weekday()) % 7)  # Fridays
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "selic_year", "ipca_year"])
        while d <= end:
            # latest policy rate known on the publication date
            k = bisect.bisect_right(days, d) - 1
            stance = policy_stance(d)
            exp_rate = selic[k] + 0.75 * stance + rng.normal(0, 0.15)
            ipca = 4.0 + 1.2 * stance + rng.normal(0, 0.2)
            w.writerow([d.isoformat(), f"{exp_rate:.2f}", f"{ipca:.2f}"])
            d += timedelta(days=7)


def write_statements(directory, docs):
    directory.mkdir(parents=True, exist_ok=True)
    for doc in docs:
        (directory / f"{doc.statement_date.isoformat()}.txt").write_text(doc.text, encoding="utf-8")


def write_events(path, events):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "shock_date", "shock_type", "prev_statement_date", "next_statement_date"])
        for e in events:
            w.writerow([e["id"], e["shock"].isoformat(), e["type"].value,
                        e["prev"].isoformat() if e["prev"] else "", e["next"].isoformat()])


RUN_CFG = """\
# synthetic fixture run configuration
events = events.csv
market = market.csv
focus = focus.csv
statements = statements
output = out
sample_start = 2016-08-31
specs = di252_fiscal, di252_baseline, di504_baseline, slope_baseline
lambda = 1.0
lasso_lambda = 1.0
min_n = {min_n}
controls = d_fx_shock, d_vix_shock, d_cds_shock
slope = long_minus_short
tone_denominator = inscope
"""


def link(shock, stmts):
    nxt = next(s for s in stmts if s >= shock)
    prev = [s for s in stmts if s < shock]
    return (prev[-1] if prev else None), nxt


def make_demo(out: Path):
    rng = np.random.default_rng(20160831)
    days = business_days(date(2015, 1, 2), date(2026, 3, 18), rng)
    trading = set(days)
    stmts = statement_dates(date(2015, 1, 14), date(2026, 3, 18), trading)
    assert stmts[-1] == date(2026, 3, 18) == days[-1]

    docs, rate = [], 12.25
    for s in stmts:
        stance = policy_stance(s)
        rate = float(np.clip(rate + 0.5 * round(stance * 1.2), 2.0, 15.0))
        docs.append(StatementDoc(s, make_statement(rng, stance, rate)))
    features = score_corpus(docs, load_lexicon())

    sample_start = date(2016, 8, 31)
    post = [s for s in stmts if s >= sample_start]
    events = []
    # monetary policy events sit on statement dates (same-day rule)
    for s in sorted(rng.choice(post[:-1], size=16, replace=False).tolist()):
        prev, _ = link(s - timedelta(days=1), stmts)
        events.append({"type": ShockType.MONETARY_POLICY, "shock": s, "prev": prev, "next": s})
    last_ok = post[-2]
    span = (last_ok - sample_start).days
    for st, count in ((ShockType.FISCAL, 24), (ShockType.EXTERNAL, 10), (ShockType.POLITICAL, 9)):
        for _ in range(count):
            shock = sample_start + timedelta(days=int(rng.integers(1, span)))
            prev, nxt = link(shock, stmts)
            events.append({"type": st, "shock": shock, "prev": prev, "next": nxt})
    # the one eligible event without a statement window: its statement is the last market day
    late = date(2026, 3, 12)
    events.append({"type": ShockType.POLITICAL, "shock": late, "prev": post[-2], "next": stmts[-1]})
    # pre-sample events
    pre_span = (sample_start - date(2015, 2, 1)).days
    types = list(ShockType)
    for i in range(15):
        shock = date(2015, 2, 1) + timedelta(days=int(rng.integers(0, pre_span)))
        prev, nxt = link(shock, stmts)
        events.append({"type": types[i % 4], "shock": shock, "prev": prev, "next": nxt})
    events.sort(key=lambda e: (e["shock"], e["type"].value))
    for i, e in enumerate(events, start=1):
        e["id"] = f"EV{i:03d}"

    shocks = []
    for e in events:
        eff = next(d for d in days if d >= e["shock"])
        shocks.append((eff, float(rng.normal(0, 0.12))))
    cols, selic = simulate_market(rng, days, stmts, features, shocks)

    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)
    write_market(out / "market.csv", days, cols)
    write_focus(out / "focus.csv", days, selic, rng)
    write_statements(out / "statements", docs)
    write_events(out / "events.csv", events)
    (out / "run.cfg").write_text(RUN_CFG.format(min_n=20), encoding="utf-8")


def make_small(out: Path):
    rng = np.random.default_rng(2019)
    days = business_days(date(2019, 1, 2), date(2020, 12, 30), rng)
    trading = set(days)
    stmts = statement_dates(date(2019, 1, 10), date(2020, 12, 9), trading)
    docs = []
    rate = 6.5
    for s in stmts:
        stance = policy_stance(s)
        rate = float(np.clip(rate + 0.5 * round(stance * 1.2), 2.0, 15.0))
        docs.append(StatementDoc(s, make_statement(rng, stance, rate)))
    features = score_corpus(docs, load_lexicon())
    types = list(ShockType)
    chosen = stmts[1:13]
    events = []
    for i, s in enumerate(chosen):
        st = types[i % 4]
        shock = s if st is ShockType.MONETARY_POLICY else s - timedelta(days=int(rng.integers(3, 20)))
        prev, nxt = link(shock, stmts)
        events.append({"id": f"S{i + 1:02d}", "type": st, "shock": shock, "prev": prev, "next": nxt})
    shocks = [(next(d for d in days if d >= e["shock"]), float(rng.normal(0, 0.1))) for e in events]
    cols, selic = simulate_market(rng, days, stmts, features, shocks)

    # blank di_252d at the statement-window end of the 7th event
    victim = events[6]
    end = next(d for d in days if d > victim["next"])
    touching = [
        e for e in events
        if end in (next(d for d in days if d >= e["shock"]), next(d for d in days if d > e["next"]))
        or end == max(d for d in days if d < e["shock"])
    ]
    assert touching == [victim], touching

    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)
    write_market(out / "market.csv", days, cols, blank={(end, "di_252d")})
    write_focus(out / "focus.csv", days, selic, rng)
    write_statements(out / "statements", docs)
    write_events(out / "events.csv", events)
    (out / "run.cfg").write_text(RUN_CFG.format(min_n=5), encoding="utf-8")


if __name__ == "__main__":
    make_demo(ROOT / "demo")
    make_small(ROOT / "small")
    print("fixtures written to", ROOT)
