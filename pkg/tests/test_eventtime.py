"""Survival cohort derivation, plausibility rules, Kaplan-Meier."""

import numpy as np
import pytest

import oracles
from helpers import make_table
from registry_ida.errors import EmptyCohort
from registry_ida.eventtime import (
    DISPOSITION_IMPLAUSIBLE,
    DISPOSITION_INCLUDED,
    HORIZON_DAYS,
    LATE_DATE_DAYS,
    CohortRow,
    RecipientDates,
    SurvivalRecord,
    apply_plausibility,
    assemble_outcome,
    derive_death_dates,
    derive_gfd,
    derive_lfud,
    cohort_report,
    collect_recipient_dates,
    kaplan_meier,
    km_curves,
    lfud_after_death_count,
)
from registry_ida.schema import EventTimeConfig

TX = 1000


def dates(**kw) -> RecipientDates:
    return RecipientDates(recipient_id="r", tx_date=TX, **kw)


def test_early_date_excludes_recipient():
    cleaned, disposition = apply_plausibility(dates(et_dd=TX - 31))
    assert disposition == DISPOSITION_IMPLAUSIBLE


def test_slightly_early_date_recodes_to_tx():
    cleaned, disposition = apply_plausibility(dates(et_dd=TX - 30))
    assert disposition == DISPOSITION_INCLUDED
    assert cleaned.et_dd == TX


def test_late_date_becomes_absent():
    cleaned, disposition = apply_plausibility(
        dates(et_dd=TX + LATE_DATE_DAYS, iqtig_dd=TX + LATE_DATE_DAYS - 1)
    )
    assert disposition == DISPOSITION_INCLUDED
    assert cleaned.et_dd is None
    assert cleaned.iqtig_dd == TX + LATE_DATE_DAYS - 1


def test_exclusion_beats_recoding():
    # one excludable date plus one recodable date: exclusion wins
    cleaned, disposition = apply_plausibility(
        dates(et_dd=TX - 31, iqtig_dd=TX - 10)
    )
    assert disposition == DISPOSITION_IMPLAUSIBLE


def test_derivation_rules():
    assert derive_lfud([5, 9, 7], 4) == (4, 9)
    assert derive_lfud([], 4) == (4, None)
    assert derive_death_dates(8, [6, 7]) == (8, 6)
    assert derive_death_dates(None, []) == (None, None)
    assert derive_gfd([9, 5], [7]) == (5, 7)


def test_outcome_per_definition():
    d = dates(
        et_dd=TX + 400,
        iqtig_dd=TX + 350,
        reported_lfud=TX + 300,
        derived_lfud=TX + 500,
    )
    et = assemble_outcome(d, "et")
    # reported follow-up ends before the ET death: censored at 300
    assert (et.t_days, et.delta) == (300, 0)
    iqtig = assemble_outcome(d, "iqtig")
    assert (iqtig.t_days, iqtig.delta) == (350, 1)
    combined = assemble_outcome(d, "combined")
    # earliest death over both providers, latest follow-up
    assert (combined.t_days, combined.delta) == (350, 1)


def test_outcome_event_at_horizon_counts():
    d = dates(et_dd=TX + HORIZON_DAYS, reported_lfud=TX + 2000)
    out = assemble_outcome(d, "et")
    assert (out.t_days, out.delta) == (HORIZON_DAYS, 1)


def test_outcome_event_after_horizon_censors():
    d = dates(et_dd=TX + HORIZON_DAYS + 1, reported_lfud=TX + 2000)
    out = assemble_outcome(d, "et")
    assert (out.t_days, out.delta) == (HORIZON_DAYS, 0)


def test_outcome_none_when_no_dates():
    assert assemble_outcome(dates(), "et") is None
    assert assemble_outcome(dates(iqtig_dd=TX + 5), "et") is None


def test_lfud_after_death_is_counted_not_silenced():
    rows = [
        dates(et_dd=TX + 100, derived_lfud=TX + 150),
        dates(et_dd=TX + 100, derived_lfud=TX + 50),
        dates(derived_lfud=TX + 10),
    ]
    assert lfud_after_death_count(rows) == 1


def test_km_four_subject_fixture():
    # hand product-limit: 3/4 at t=1, then 0.75 * 1/2 at t=2
    records = [
        SurvivalRecord("a", 1, 1),
        SurvivalRecord("b", 1.5, 0),
        SurvivalRecord("c", 2, 1),
        SurvivalRecord("d", 3, 0),
    ]
    points = kaplan_meier(records)
    assert [(p.time, p.survival) for p in points] == [
        (0.0, 1.0),
        (1.0, 0.75),
        (2.0, 0.375),
    ]
    assert [(p.n_at_risk, p.n_events) for p in points] == [
        (4, 0),
        (4, 1),
        (2, 1),
    ]


def test_km_censored_at_event_time_stays_at_risk():
    records = [
        SurvivalRecord("a", 5, 1),
        SurvivalRecord("b", 5, 0),
        SurvivalRecord("c", 9, 0),
    ]
    points = kaplan_meier(records)
    assert points[1].n_at_risk == 3
    assert points[1].survival == pytest.approx(2 / 3)


def test_km_empty_cohort_raises():
    with pytest.raises(EmptyCohort):
        kaplan_meier([])


def test_km_equals_empirical_survivor_without_censoring():
    rng = np.random.default_rng(11)
    for _round in range(50):
        n = int(rng.integers(1, 60))
        times = [int(t) for t in rng.integers(1, 30, n)]
        records = [
            SurvivalRecord(f"r{i}", t, 1) for i, t in enumerate(times)
        ]
        points = kaplan_meier(records)
        for point in points[1:]:
            empirical = sum(1 for t in times if t > point.time) / n
            assert point.survival == pytest.approx(empirical, abs=1e-12)


def cohort_tables() -> dict:
    sid = {"structural": True}
    transplants = make_table(
        "transplants",
        [
            ("rid", "identifier", "ET", ["r1", "r2", "r3", "r3"], sid),
            ("tx_date", "relative_date", "ET", [100, None, 200, 150]),
            ("last_contact", "relative_date", "ET", [900, 500, None, 400]),
            ("failure_date", "relative_date", "ET", [None, None, 300, 250]),
        ],
        4,
    )
    recipients = make_table(
        "recipients",
        [
            ("rid", "identifier", "ET", ["r1", "r2", "r3"], sid),
            ("death_date", "relative_date", "ET", [None, 600, 700]),
        ],
        3,
    )
    followups = make_table(
        "followups",
        [
            ("rid", "identifier", "IQTIG", ["r1", "r1", "r3"], sid),
            ("visit_date", "relative_date", "IQTIG", [400, 800, 350]),
            ("death_seen", "relative_date", "IQTIG", [None, None, None]),
            ("failure_seen", "relative_date", "IQTIG", [None, None, 320]),
        ],
        3,
    )
    return {
        "transplants": transplants,
        "recipients": recipients,
        "followups": followups,
    }


COHORT_CONFIG = EventTimeConfig(
    recipient_id="rid",
    tx_table="transplants",
    tx_date="tx_date",
    reported_lfud="last_contact",
    graft_failure_date="failure_date",
    recipient_table="recipients",
    death_date="death_date",
    followup_table="followups",
    fu_date_columns=("visit_date",),
    fu_death_columns=("death_seen",),
    fu_failure_columns=("failure_seen",),
)


def test_collect_recipient_dates_combines_sources():
    dates, no_tx = collect_recipient_dates(cohort_tables(), COHORT_CONFIG)
    assert no_tx == ["r2"]
    by_id = {d.recipient_id: d for d in dates}
    assert set(by_id) == {"r1", "r3"}
    r1 = by_id["r1"]
    assert (r1.tx_date, r1.reported_lfud, r1.derived_lfud) == (100, 900, 800)
    assert r1.et_dd is None and r1.et_gfd is None
    r3 = by_id["r3"]
    # two transplant rows collapse: earliest tx, latest contact, earliest gfd
    assert (r3.tx_date, r3.reported_lfud) == (150, 400)
    assert (r3.et_gfd, r3.iqtig_gfd) == (250, 320)
    assert r3.et_dd == 700


def test_cohort_report_counts():
    rows, counts = cohort_report(cohort_tables(), COHORT_CONFIG)
    assert counts["n_recipients"] == 3
    assert counts["n_no_tx_date"] == 1
    assert counts["n_excluded_implausible"] == 0
    assert counts["n_included_et"] == 2
    assert counts["n_included_iqtig"] == 2
    assert counts["n_events_et"] == 1
    included = {
        (r.recipient_id, r.definition): (r.t_days, r.delta)
        for r in rows
        if r.disposition == DISPOSITION_INCLUDED
    }
    # r3 fails the graft at day 250 (ET route), 100 days after tx
    assert included[("r3", "et")] == (100, 1)
    # r1 has no ET event: censored at reported last contact
    assert included[("r1", "et")] == (800, 0)


def test_km_curves_skip_definitions_without_records():
    rows = [
        CohortRow("a", "et", 5, 1, DISPOSITION_INCLUDED),
        CohortRow("a", "iqtig", None, None, "excluded_no_dates"),
        CohortRow("a", "combined", 5, 1, DISPOSITION_INCLUDED),
    ]
    curves = km_curves(rows)
    assert set(curves) == {"et", "combined"}
    assert curves["et"][-1].survival == 0.0


def test_km_matches_naive_oracle_with_censoring():
    rng = np.random.default_rng(12)
    for _round in range(30):
        n = int(rng.integers(1, 50))
        times = [int(t) for t in rng.integers(1, 20, n)]
        deltas = [int(d) for d in rng.integers(0, 2, n)]
        if sum(deltas) == 0:
            deltas[0] = 1
        records = [
            SurvivalRecord(f"r{i}", t, d)
            for i, (t, d) in enumerate(zip(times, deltas))
        ]
        got = [(p.time, p.survival) for p in kaplan_meier(records)]
        want = oracles.km(times, deltas)
        assert len(got) == len(want)
        for (gt, gs), (wt, ws) in zip(got, want):
            assert gt == wt
            assert gs == pytest.approx(ws, abs=1e-12)
