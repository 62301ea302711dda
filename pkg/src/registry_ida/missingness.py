"""Provider-adjusted missing-data statistics.

Every statistic is computed over the contributing provider's own rows:
for a column owned by provider DP, sums range over the rows where DP
observes at least one cell, never over the whole table.  A provider
that skips entire rows therefore does not inflate its missing counts.

Influx of a column measures how often its missing cells coincide with
observed cells elsewhere in the provider's columns (imputation
potential for this column); outflux measures how often its observed
cells coincide with missing cells elsewhere (imputation potential of
this column for the others).  The inner index runs over all of the
provider's columns including the column itself; the self terms vanish
but they do enlarge the denominators, which changes the values, so this
convention is part of the contract.  Statistics whose denominator is
empty are returned as None and rendered with an explicit Undefined
token in reports, never as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyProviderIndex,
    NoMissingTarget,
    ProviderMismatch,
    RowOutsideProviderIndex,
)
from .model import RegistryTable


@dataclass(frozen=True)
class MissRow:
    """Missingness counts for one column."""

    table: str
    column: str
    provider: str
    n_provider_rows: int
    n_missing: int
    n_observed: int
    pm: float | None  # None when the provider observes no rows


@dataclass(frozen=True)
class FluxRow:
    """Influx and outflux coordinates for one column."""

    table: str
    column: str
    provider: str
    influx: float | None
    outflux: float | None


def _column_context(table: RegistryTable, column: str):
    j = table.column_index(column)
    provider = table.columns[j].provider
    rows = table.provider_rows(provider)
    cols = table.provider_columns(provider)
    return j, provider, rows, cols


def count_missing(table: RegistryTable, column: str) -> tuple[int, int]:
    """(missing, observed) counts over the provider's own rows."""
    j, _, rows, _ = _column_context(table, column)
    missing = int((table.missing_mask[:, j] & rows).sum())
    observed = int(rows.sum()) - missing
    return missing, observed


def proportion_missing(table: RegistryTable, column: str) -> float:
    """Missing fraction of the column over the provider's rows."""
    j, provider, rows, _ = _column_context(table, column)
    denom = int(rows.sum())
    if denom == 0:
        raise EmptyProviderIndex(
            f"table {table.name!r}: provider {provider!r} observes no rows"
        )
    missing = int((table.missing_mask[:, j] & rows).sum())
    return missing / denom


def opm(table: RegistryTable, provider: str, row: int) -> float:
    """Fraction of the provider's columns missing in one row."""
    rows = table.provider_rows(provider)
    cols = table.provider_columns(provider)
    if not cols or row < 0 or row >= table.n_rows or not rows[row]:
        raise RowOutsideProviderIndex(
            f"table {table.name!r}: row {row} is outside provider "
            f"{provider!r}'s rows"
        )
    missing = int(table.missing_mask[row, list(cols)].sum())
    return missing / len(cols)


def opm_vector(table: RegistryTable, provider: str) -> np.ndarray:
    """Per-row missing fractions over the provider's rows, in row order."""
    rows = table.provider_rows(provider)
    cols = table.provider_columns(provider)
    if not cols or not rows.any():
        raise EmptyProviderIndex(
            f"table {table.name!r}: provider {provider!r} observes no rows"
        )
    sub = table.missing_mask[np.ix_(rows, list(cols))]
    return sub.sum(axis=1) / len(cols)


def usable_cases(table: RegistryTable, target: str, source: str) -> float:
    """Fraction of the target's missing cells with the source observed.

    Same-provider form: both columns must belong to one provider, and
    the count runs over that provider's rows.
    """
    j, provider, rows, _ = _column_context(table, target)
    k = table.column_index(source)
    source_provider = table.columns[k].provider
    if source_provider != provider:
        raise ProviderMismatch(
            f"table {table.name!r}: {target!r} belongs to {provider!r} but "
            f"{source!r} belongs to {source_provider!r}"
        )
    target_missing = table.missing_mask[:, j] & rows
    m = int(target_missing.sum())
    if m == 0:
        raise NoMissingTarget(
            f"table {table.name!r}: column {target!r} has no missing values"
        )
    numer = int((target_missing & ~table.missing_mask[:, k]).sum())
    return numer / m


def influx(table: RegistryTable, column: str) -> float | None:
    """How well the provider's other columns could impute this one.

    None when the provider observes no rows (empty denominator).
    """
    j, _, rows, cols = _column_context(table, column)
    if j not in cols:
        raise RowOutsideProviderIndex(
            f"table {table.name!r}: {column!r} is structural, flux is "
            "defined over provider columns only"
        )
    sub = table.missing_mask[np.ix_(rows, list(cols))]
    observed_per_row = (~sub).sum(axis=1)
    denom = int(observed_per_row.sum())
    if denom == 0:
        return None
    j_pos = cols.index(j)
    numer = int(observed_per_row[sub[:, j_pos]].sum())
    return numer / denom


def outflux(table: RegistryTable, column: str) -> float | None:
    """How well this column could impute the provider's other columns.

    None when no cell of the provider's columns is missing over its
    rows, which makes the measure incomputable rather than zero.
    """
    j, _, rows, cols = _column_context(table, column)
    if j not in cols:
        raise RowOutsideProviderIndex(
            f"table {table.name!r}: {column!r} is structural, flux is "
            "defined over provider columns only"
        )
    sub = table.missing_mask[np.ix_(rows, list(cols))]
    missing_per_row = sub.sum(axis=1)
    denom = int(missing_per_row.sum())
    if denom == 0:
        return None
    j_pos = cols.index(j)
    numer = int(missing_per_row[~sub[:, j_pos]].sum())
    return numer / denom


def miss_report(table: RegistryTable) -> list[MissRow]:
    """Missingness counts for every non-structural column."""
    out = []
    for meta in table.columns:
        if meta.structural:
            continue
        rows = table.provider_rows(meta.provider)
        denom = int(rows.sum())
        j = table.column_index(meta.name)
        missing = int((table.missing_mask[:, j] & rows).sum())
        pm = missing / denom if denom else None
        out.append(
            MissRow(
                table=table.name,
                column=meta.name,
                provider=meta.provider,
                n_provider_rows=denom,
                n_missing=missing,
                n_observed=denom - missing,
                pm=pm,
            )
        )
    return out


def flux_report(table: RegistryTable) -> list[FluxRow]:
    """Influx and outflux for every non-structural column."""
    out = []
    for meta in table.columns:
        if meta.structural:
            continue
        out.append(
            FluxRow(
                table=table.name,
                column=meta.name,
                provider=meta.provider,
                influx=influx(table, meta.name),
                outflux=outflux(table, meta.name),
            )
        )
    return out
