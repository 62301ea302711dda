"""Cross-provider agreement of multi-sourced variables.

For every group of columns that store the same quantity per provider,
two questions are answered.  First, how often could one provider's
column fill another's gaps (usable cases, directional).  Second, how
well do the providers agree where both report (association, symmetric):
Cramér's V for categorical pairs, absolute Pearson correlation for
numeric pairs; relative dates count as numeric.

Association is computed on the rows where both columns hold usable
values; sentinel codes in numeric columns are codes, not measurements,
so they are excluded there, while categorical columns keep them as
ordinary levels.  Pairs without a value carry exactly one reason:
type_mismatch (numeric against categorical, decided from the schema),
no_overlap (no row where both are usable), or constant_data (either
restriction is constant), checked in that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NoMissingTarget, NoSharedRows
from .ingest import MultiSourceGroup
from .model import NUMERIC_KINDS, RegistryTable

NUMERIC_MEASURE = "abs_pearson"
CATEGORICAL_MEASURE = "cramers_v"

REASON_TYPE_MISMATCH = "type_mismatch"
REASON_NO_OVERLAP = "no_overlap"
REASON_CONSTANT = "constant_data"

HIGH_AGREEMENT = 0.9


@dataclass(frozen=True)
class Association:
    """Either a measured value or a reason why none exists."""

    measure: str | None
    value: float | None
    reason: str | None


@dataclass(frozen=True)
class PairResult:
    """One ordered (target, source) pair within a group."""

    table: str
    group: str
    target_provider: str
    source_provider: str
    target_column: str
    source_column: str
    usable_cases: float | None
    usable_reason: str | None
    measure: str | None
    association: float | None
    not_computable: str | None


def cross_provider_usable_cases(
    table: RegistryTable, target: str, source: str
) -> float:
    """Fraction of the target's missing cells the source could fill.

    Counting runs over the target provider's rows; the denominator is
    the target's missing count there.
    """
    j = table.column_index(target)
    k = table.column_index(source)
    rows = table.provider_rows(table.columns[j].provider)
    target_missing = table.missing_mask[:, j] & rows
    source_observed = ~table.missing_mask[:, k]
    if not (~table.missing_mask[:, j] & source_observed).any():
        raise NoSharedRows(
            f"table {table.name!r}: {target!r} and {source!r} are never "
            "observed together"
        )
    m = int(target_missing.sum())
    if m == 0:
        raise NoMissingTarget(
            f"table {table.name!r}: column {target!r} has no missing values"
        )
    numer = int((target_missing & source_observed).sum())
    return numer / m


def _usable_values(table: RegistryTable, column: str):
    """(usable mask, values) with sentinels dropped for numeric kinds."""
    meta = table.meta(column)
    if meta.kind in NUMERIC_KINDS:
        vals = table.numeric_array(column)
        return ~np.isnan(vals), vals
    labels = table.string_array(column)
    mask = np.array([v is not None for v in labels], dtype=bool)
    return mask, labels


def cramers_v(table_counts: np.ndarray) -> float:
    """Cramér's V of a contingency table, uncorrected.

    sqrt(chi2 / (n * (min(rows, cols) - 1))) with no continuity
    correction; the caller guarantees no zero margins.
    """
    counts = np.asarray(table_counts, dtype=float)
    n = counts.sum()
    row = counts.sum(axis=1, keepdims=True)
    col = counts.sum(axis=0, keepdims=True)
    expected = row @ col / n
    chi2 = ((counts - expected) ** 2 / expected).sum()
    k = min(counts.shape) - 1
    value = float(np.sqrt(chi2 / (n * k)))
    return min(value, 1.0)


def association(
    table: RegistryTable, column_a: str, column_b: str
) -> Association:
    """Agreement of two columns on their both-usable rows."""
    kind_a = table.meta(column_a).kind in NUMERIC_KINDS
    kind_b = table.meta(column_b).kind in NUMERIC_KINDS
    if kind_a != kind_b:
        return Association(None, None, REASON_TYPE_MISMATCH)
    mask_a, vals_a = _usable_values(table, column_a)
    mask_b, vals_b = _usable_values(table, column_b)
    both = mask_a & mask_b
    if not both.any():
        return Association(None, None, REASON_NO_OVERLAP)
    rows = np.flatnonzero(both)
    if kind_a:
        a = vals_a[rows]
        b = vals_b[rows]
        if np.all(a == a[0]) or np.all(b == b[0]):
            return Association(None, None, REASON_CONSTANT)
        a = a - a.mean()
        b = b - b.mean()
        r = (a * b).sum() / np.sqrt((a * a).sum() * (b * b).sum())
        return Association(NUMERIC_MEASURE, min(abs(float(r)), 1.0), None)
    a_labels = [vals_a[i] for i in rows]
    b_labels = [vals_b[i] for i in rows]
    a_levels = sorted(set(a_labels))
    b_levels = sorted(set(b_labels))
    if len(a_levels) < 2 or len(b_levels) < 2:
        return Association(None, None, REASON_CONSTANT)
    a_code = {v: i for i, v in enumerate(a_levels)}
    b_code = {v: i for i, v in enumerate(b_levels)}
    counts = np.zeros((len(a_levels), len(b_levels)))
    for va, vb in zip(a_labels, b_labels):
        counts[a_code[va], b_code[vb]] += 1
    return Association(CATEGORICAL_MEASURE, cramers_v(counts), None)


def consistency_report(
    tables: dict[str, RegistryTable], groups: list[MultiSourceGroup]
) -> tuple[list[PairResult], dict[str, int]]:
    """All ordered pair results plus unordered-pair summary counts.

    Association is computed once per unordered pair and echoed on both
    orientations; usable cases are directional.
    """
    results: list[PairResult] = []
    n_pairs = 0
    n_computed = 0
    n_high = 0
    reasons = {
        REASON_TYPE_MISMATCH: 0,
        REASON_NO_OVERLAP: 0,
        REASON_CONSTANT: 0,
    }
    for group in groups:
        table = tables[group.table]
        for (prov_a, col_a), (prov_b, col_b) in itertools.combinations(
            group.members, 2
        ):
            kind = association(table, col_a, col_b)
            n_pairs += 1
            if kind.value is not None:
                n_computed += 1
                if kind.value >= HIGH_AGREEMENT:
                    n_high += 1
            else:
                reasons[kind.reason] += 1
            for target, source in (
                ((prov_a, col_a), (prov_b, col_b)),
                ((prov_b, col_b), (prov_a, col_a)),
            ):
                usable = None
                usable_reason = None
                try:
                    usable = cross_provider_usable_cases(
                        table, target[1], source[1]
                    )
                except NoSharedRows:
                    usable_reason = "no_shared_rows"
                except NoMissingTarget:
                    usable_reason = "no_missing_target"
                results.append(
                    PairResult(
                        table=group.table,
                        group=group.key,
                        target_provider=target[0],
                        source_provider=source[0],
                        target_column=target[1],
                        source_column=source[1],
                        usable_cases=usable,
                        usable_reason=usable_reason,
                        measure=kind.measure,
                        association=kind.value,
                        not_computable=kind.reason,
                    )
                )
    summary = {
        "n_groups": len(groups),
        "n_association_pairs": n_pairs,
        "n_computed": n_computed,
        "n_not_computable": n_pairs - n_computed,
        "n_type_mismatch": reasons[REASON_TYPE_MISMATCH],
        "n_no_overlap": reasons[REASON_NO_OVERLAP],
        "n_constant_data": reasons[REASON_CONSTANT],
        "n_high_agreement": n_high,
    }
    return results, summary
