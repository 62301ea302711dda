"""Event-time outcomes from multi-provider date sources.

Per recipient, three candidate event dates exist: death, graft failure,
and last follow-up; each can be reported by the transplant registry
itself (the reported route) or derived from follow-up records (the
derived route).  Three outcome definitions combine them:

  et        death, graft failure, and last contact as reported by the
            transplant registry
  iqtig     death and graft failure from follow-up records; last
            follow-up derived as the latest follow-up date
  combined  earliest death date, earliest graft-failure date, latest
            last-follow-up date across both routes

Times count in days since transplantation.  A year is 365.25 days; the
outcome horizon is 3 years = 1095 whole days; dates 15 years or more
after transplantation (>= 5478 days) are treated as data errors.

Plausibility cleaning, in order: any date more than 30 days before the
transplantation date excludes the recipient outright; dates within the
30 days before are recoded to the transplantation date; far-future
dates are set absent.  Exclusion always wins over recoding.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .errors import EmptyCohort
from .model import RegistryTable
from .schema import EventTimeConfig

DAYS_PER_YEAR = 365.25
HORIZON_DAYS = int(3 * DAYS_PER_YEAR)  # 1095
LATE_DATE_DAYS = int(15 * DAYS_PER_YEAR)  # 5478
EARLY_SLACK_DAYS = 30

DEFINITIONS = ("et", "iqtig", "combined")

DISPOSITION_INCLUDED = "included"
DISPOSITION_IMPLAUSIBLE = "excluded_implausible_date"
DISPOSITION_NO_DATES = "excluded_no_dates"
DISPOSITION_NO_TX = "excluded_no_tx_date"


@dataclass(frozen=True)
class RecipientDates:
    """All date sources for one recipient, as relative days."""

    recipient_id: str
    tx_date: int
    reported_lfud: int | None = None
    derived_lfud: int | None = None
    et_dd: int | None = None
    iqtig_dd: int | None = None
    et_gfd: int | None = None
    iqtig_gfd: int | None = None

    def date_fields(self) -> tuple[tuple[str, int | None], ...]:
        return (
            ("reported_lfud", self.reported_lfud),
            ("derived_lfud", self.derived_lfud),
            ("et_dd", self.et_dd),
            ("iqtig_dd", self.iqtig_dd),
            ("et_gfd", self.et_gfd),
            ("iqtig_gfd", self.iqtig_gfd),
        )


@dataclass(frozen=True)
class SurvivalRecord:
    """Follow-up time in days since transplantation and event flag."""

    recipient_id: str
    t_days: int
    delta: int


@dataclass(frozen=True)
class KMPoint:
    time: float
    survival: float
    n_at_risk: int
    n_events: int


def derive_lfud(
    followup_dates: Sequence[int], reported: int | None
) -> tuple[int | None, int | None]:
    """(reported, derived) last follow-up; derived is the latest date."""
    derived = max(followup_dates) if followup_dates else None
    return reported, derived


def derive_death_dates(
    recipient_death: int | None, followup_deaths: Sequence[int]
) -> tuple[int | None, int | None]:
    """(reported, derived) death dates; earliest wins per route."""
    derived = min(followup_deaths) if followup_deaths else None
    return recipient_death, derived


def derive_gfd(
    reported_failures: Sequence[int], followup_failures: Sequence[int]
) -> tuple[int | None, int | None]:
    """(reported, derived) graft-failure dates; earliest wins per route."""
    reported = min(reported_failures) if reported_failures else None
    derived = min(followup_failures) if followup_failures else None
    return reported, derived


def apply_plausibility(dates: RecipientDates) -> tuple[RecipientDates, str]:
    """Clean one recipient's dates; returns (dates, disposition)."""
    for _, value in dates.date_fields():
        if value is not None and value < dates.tx_date - EARLY_SLACK_DAYS:
            return dates, DISPOSITION_IMPLAUSIBLE
    updates: dict[str, int | None] = {}
    for name, value in dates.date_fields():
        if value is None:
            continue
        if value < dates.tx_date:
            updates[name] = dates.tx_date
        elif value - dates.tx_date >= LATE_DATE_DAYS:
            updates[name] = None
    if updates:
        dates = replace(dates, **updates)
    return dates, DISPOSITION_INCLUDED


def _min_present(*values: int | None) -> int | None:
    present = [v for v in values if v is not None]
    return min(present) if present else None


def _max_present(*values: int | None) -> int | None:
    present = [v for v in values if v is not None]
    return max(present) if present else None


def assemble_outcome(
    dates: RecipientDates,
    definition: str,
    horizon_days: int = HORIZON_DAYS,
) -> SurvivalRecord | None:
    """Survival record under one definition; None when undefined.

    A recipient with no death, graft-failure, or last-follow-up date
    under the definition has no observable time and is excluded.  The
    time is the earliest present date capped at the horizon; the event
    flag is set when an event date attains that minimum, so an event
    exactly at the horizon still counts as an event.
    """
    if definition == "et":
        dd, gfd, lfud = dates.et_dd, dates.et_gfd, dates.reported_lfud
    elif definition == "iqtig":
        dd, gfd, lfud = dates.iqtig_dd, dates.iqtig_gfd, dates.derived_lfud
    elif definition == "combined":
        dd = _min_present(dates.et_dd, dates.iqtig_dd)
        gfd = _min_present(dates.et_gfd, dates.iqtig_gfd)
        lfud = _max_present(dates.reported_lfud, dates.derived_lfud)
    else:
        raise ValueError(f"unknown definition {definition!r}")
    if dd is None and gfd is None and lfud is None:
        return None
    times = [
        v - dates.tx_date for v in (dd, gfd, lfud) if v is not None
    ]
    t = min(min(times), horizon_days)
    event_time = _min_present(
        dd - dates.tx_date if dd is not None else None,
        gfd - dates.tx_date if gfd is not None else None,
    )
    delta = int(event_time is not None and event_time == t)
    return SurvivalRecord(recipient_id=dates.recipient_id, t_days=t, delta=delta)


def kaplan_meier(records: Iterable[SurvivalRecord]) -> list[KMPoint]:
    """Product-limit survival curve.

    The risk set at time t contains every subject with T >= t, so
    subjects censored exactly at an event time still count as at risk:
    events precede censorings at tied times.  Points are emitted at
    time 0 and at every distinct event time.
    """
    items = sorted(records, key=lambda r: (r.t_days, -r.delta))
    n = len(items)
    if n == 0:
        raise EmptyCohort("Kaplan-Meier needs at least one record")
    points = [KMPoint(time=0.0, survival=1.0, n_at_risk=n, n_events=0)]
    survival = 1.0
    at_risk = n
    i = 0
    while i < n:
        t = items[i].t_days
        d = 0
        removed = 0
        while i < n and items[i].t_days == t:
            d += items[i].delta
            removed += 1
            i += 1
        if d > 0:
            survival *= 1.0 - d / at_risk
            points.append(
                KMPoint(
                    time=float(t),
                    survival=survival,
                    n_at_risk=at_risk,
                    n_events=d,
                )
            )
        at_risk -= removed
    return points


@dataclass(frozen=True)
class CohortRow:
    """One (recipient, definition) line of the cohort report."""

    recipient_id: str
    definition: str
    t_days: int | None
    delta: int | None
    disposition: str


def _present_ints(values: Iterable[object]) -> list[int]:
    return [v for v in values if isinstance(v, int)]


def collect_recipient_dates(
    tables: dict[str, RegistryTable], config: EventTimeConfig
) -> tuple[list[RecipientDates], list[str]]:
    """Assemble per-recipient date sources as the config declares.

    Returns (dates, ids_without_tx_date).  Recipients appear in first-
    seen transplantation order.  Non-integer cells in date columns
    (sentinel codes) count as absent.  Multiple transplantation rows
    per recipient collapse to the earliest transplantation, the latest
    reported last contact, and the earliest reported graft failure.
    """
    tx = tables[config.tx_table]
    ids = tx.column(config.recipient_id)
    tx_dates = tx.column(config.tx_date)
    lfud_col = (
        tx.column(config.reported_lfud)
        if config.reported_lfud is not None
        else None
    )
    gfd_col = (
        tx.column(config.graft_failure_date)
        if config.graft_failure_date is not None
        else None
    )
    order: list[str] = []
    tx_of: dict[str, list[int]] = {}
    lfud_of: dict[str, list[int]] = {}
    gfd_of: dict[str, list[int]] = {}
    for i in range(tx.n_rows):
        rid = ids[i]
        if rid is None:
            continue
        rid = str(rid)
        if rid not in tx_of:
            order.append(rid)
            tx_of[rid] = []
            lfud_of[rid] = []
            gfd_of[rid] = []
        if isinstance(tx_dates[i], int):
            tx_of[rid].append(tx_dates[i])
        if lfud_col is not None and isinstance(lfud_col[i], int):
            lfud_of[rid].append(lfud_col[i])
        if gfd_col is not None and isinstance(gfd_col[i], int):
            gfd_of[rid].append(gfd_col[i])

    death_of: dict[str, list[int]] = {}
    if config.recipient_table is not None:
        rec = tables[config.recipient_table]
        rec_ids = rec.column(config.recipient_id)
        rec_death = rec.column(config.death_date)
        for i in range(rec.n_rows):
            rid = rec_ids[i]
            if rid is None:
                continue
            rid = str(rid)
            if isinstance(rec_death[i], int):
                death_of.setdefault(rid, []).append(rec_death[i])

    fu_dates_of: dict[str, list[int]] = {}
    fu_death_of: dict[str, list[int]] = {}
    fu_failure_of: dict[str, list[int]] = {}
    if config.followup_table is not None:
        fu = tables[config.followup_table]
        fu_ids = fu.column(config.recipient_id)
        date_cols = [fu.column(c) for c in config.fu_date_columns]
        death_cols = [fu.column(c) for c in config.fu_death_columns]
        failure_cols = [fu.column(c) for c in config.fu_failure_columns]
        for i in range(fu.n_rows):
            rid = fu_ids[i]
            if rid is None:
                continue
            rid = str(rid)
            for col in date_cols:
                if isinstance(col[i], int):
                    fu_dates_of.setdefault(rid, []).append(col[i])
            for col in death_cols:
                if isinstance(col[i], int):
                    fu_death_of.setdefault(rid, []).append(col[i])
            for col in failure_cols:
                if isinstance(col[i], int):
                    fu_failure_of.setdefault(rid, []).append(col[i])

    out: list[RecipientDates] = []
    no_tx: list[str] = []
    for rid in order:
        if not tx_of[rid]:
            no_tx.append(rid)
            continue
        tx_date = min(tx_of[rid])
        reported_lfud, derived_lfud = derive_lfud(
            fu_dates_of.get(rid, []),
            max(lfud_of[rid]) if lfud_of[rid] else None,
        )
        et_dd, iqtig_dd = derive_death_dates(
            min(death_of[rid]) if rid in death_of else None,
            fu_death_of.get(rid, []),
        )
        et_gfd, iqtig_gfd = derive_gfd(
            gfd_of[rid], fu_failure_of.get(rid, [])
        )
        out.append(
            RecipientDates(
                recipient_id=rid,
                tx_date=tx_date,
                reported_lfud=reported_lfud,
                derived_lfud=derived_lfud,
                et_dd=et_dd,
                iqtig_dd=iqtig_dd,
                et_gfd=et_gfd,
                iqtig_gfd=iqtig_gfd,
            )
        )
    return out, no_tx


def lfud_after_death_count(dates: Iterable[RecipientDates]) -> int:
    """Recipients whose latest follow-up postdates their earliest death.

    Both kinds of date are kept as reported; the min/max combination
    rules resolve them, and this diagnostic surfaces how often they
    disagree.
    """
    count = 0
    for d in dates:
        lfud = _max_present(d.reported_lfud, d.derived_lfud)
        dd = _min_present(d.et_dd, d.iqtig_dd)
        if lfud is not None and dd is not None and lfud > dd:
            count += 1
    return count


def cohort_report(
    tables: dict[str, RegistryTable], config: EventTimeConfig
) -> tuple[list[CohortRow], dict[str, int]]:
    """Per-(recipient, definition) outcomes plus summary counts."""
    dates, no_tx = collect_recipient_dates(tables, config)
    rows: list[CohortRow] = []
    counts = {
        "n_recipients": len(dates) + len(no_tx),
        "n_no_tx_date": len(no_tx),
        "n_excluded_implausible": 0,
        "n_lfud_after_death": 0,
    }
    for definition in DEFINITIONS:
        counts[f"n_included_{definition}"] = 0
        counts[f"n_no_dates_{definition}"] = 0
        counts[f"n_events_{definition}"] = 0
    for rid in no_tx:
        for definition in DEFINITIONS:
            rows.append(
                CohortRow(rid, definition, None, None, DISPOSITION_NO_TX)
            )
    cleaned: list[RecipientDates] = []
    for d in dates:
        d2, disposition = apply_plausibility(d)
        if disposition != DISPOSITION_INCLUDED:
            counts["n_excluded_implausible"] += 1
            for definition in DEFINITIONS:
                rows.append(
                    CohortRow(d.recipient_id, definition, None, None, disposition)
                )
            continue
        cleaned.append(d2)
        for definition in DEFINITIONS:
            record = assemble_outcome(d2, definition)
            if record is None:
                counts[f"n_no_dates_{definition}"] += 1
                rows.append(
                    CohortRow(
                        d2.recipient_id,
                        definition,
                        None,
                        None,
                        DISPOSITION_NO_DATES,
                    )
                )
            else:
                counts[f"n_included_{definition}"] += 1
                counts[f"n_events_{definition}"] += record.delta
                rows.append(
                    CohortRow(
                        d2.recipient_id,
                        definition,
                        record.t_days,
                        record.delta,
                        DISPOSITION_INCLUDED,
                    )
                )
    counts["n_lfud_after_death"] = lfud_after_death_count(cleaned)
    return rows, counts


def km_curves(
    rows: list[CohortRow],
) -> dict[str, list[KMPoint]]:
    """Kaplan-Meier curve per definition from included cohort rows."""
    out: dict[str, list[KMPoint]] = {}
    for definition in DEFINITIONS:
        records = [
            SurvivalRecord(r.recipient_id, r.t_days, r.delta)
            for r in rows
            if r.definition == definition
            and r.disposition == DISPOSITION_INCLUDED
        ]
        if records:
            out[definition] = kaplan_meier(records)
    return out
