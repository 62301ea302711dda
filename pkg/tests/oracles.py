"""Naive reference implementations used as independent oracles.

Everything here favors obvious triple loops and exhaustive enumeration
over speed so that the vectorized library code can be checked against
an implementation whose correctness is visible by inspection.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from registry_ida.model import NUMERIC_KINDS, RegistryTable


def provider_column_names(table: RegistryTable, provider: str) -> list[str]:
    return [
        m.name
        for m in table.columns
        if m.provider == provider and not m.structural
    ]


def provider_row_set(table: RegistryTable, provider: str) -> list[int]:
    names = provider_column_names(table, provider)
    rows = []
    for i in range(table.n_rows):
        if any(table.column(c)[i] is not None for c in names):
            rows.append(i)
    return rows


def m_r_pm(table: RegistryTable, column: str):
    provider = table.meta(column).provider
    rows = provider_row_set(table, provider)
    cells = table.column(column)
    m = sum(1 for i in rows if cells[i] is None)
    r = len(rows) - m
    pm = None if not rows else m / len(rows)
    return m, r, pm


def opm(table: RegistryTable, provider: str, row: int) -> float:
    names = provider_column_names(table, provider)
    missing = sum(1 for c in names if table.column(c)[row] is None)
    return missing / len(names)


def usable(table: RegistryTable, target: str, source: str):
    provider = table.meta(target).provider
    rows = provider_row_set(table, provider)
    t_cells = table.column(target)
    s_cells = table.column(source)
    m = sum(1 for i in rows if t_cells[i] is None)
    if m == 0:
        return None
    hits = sum(
        1 for i in rows if t_cells[i] is None and s_cells[i] is not None
    )
    return hits / m


def influx(table: RegistryTable, column: str):
    provider = table.meta(column).provider
    names = provider_column_names(table, provider)
    rows = provider_row_set(table, provider)
    cells = table.column(column)
    denominator = 0
    for other in names:
        o_cells = table.column(other)
        denominator += sum(1 for i in rows if o_cells[i] is not None)
    if denominator == 0:
        return None
    numerator = 0
    for i in rows:
        if cells[i] is None:
            numerator += sum(
                1 for c in names if table.column(c)[i] is not None
            )
    return numerator / denominator


def outflux(table: RegistryTable, column: str):
    provider = table.meta(column).provider
    names = provider_column_names(table, provider)
    rows = provider_row_set(table, provider)
    cells = table.column(column)
    denominator = 0
    for other in names:
        o_cells = table.column(other)
        denominator += sum(1 for i in rows if o_cells[i] is None)
    if denominator == 0:
        return None
    numerator = 0
    for i in rows:
        if cells[i] is not None:
            numerator += sum(1 for c in names if table.column(c)[i] is None)
    return numerator / denominator


def km(times: list[int], deltas: list[int]) -> list[tuple[float, float]]:
    """Product-limit curve as (time, survival) pairs, starting at (0, 1)."""
    points = [(0.0, 1.0)]
    survival = 1.0
    for t in sorted({t for t, d in zip(times, deltas) if d == 1}):
        at_risk = sum(1 for u in times if u >= t)
        events = sum(1 for u, d in zip(times, deltas) if u == t and d == 1)
        survival *= 1.0 - events / at_risk
        points.append((float(t), survival))
    return points


def _ss(values: list[float]) -> float:
    if not values:
        return 0.0
    mean = sum(values) / len(values)
    return sum((v - mean) ** 2 for v in values)


def exhaustive_first_split(dataset, params):
    """Best admissible first split by brute-force candidate enumeration.

    Numeric features try every midpoint between consecutive distinct
    observed values; categorical features try every non-trivial level
    subset.  Returns (best_improvement, partitions) where partitions is
    the set of row partitions achieving the maximum, each encoded as a
    frozenset of two frozensets of dataset-local row positions; or None
    when no candidate is admissible.
    """
    y = [float(v) for v in dataset.y]
    n = len(y)
    if n < params.min_split:
        return None
    ss_root = _ss(y)
    best = None
    partitions = set()

    def consider(improvement, left, right):
        nonlocal best, partitions
        if len(left) < params.min_bucket or len(right) < params.min_bucket:
            return
        if improvement <= 0 or improvement < params.cp * ss_root:
            return
        key = frozenset((frozenset(left), frozenset(right)))
        if best is None or improvement > best + 1e-12:
            best = improvement
            partitions = {key}
        elif abs(improvement - best) <= 1e-12:
            partitions.add(key)

    for feature in dataset.features:
        if feature.kind == "numeric":
            values = feature.values
            observed = [i for i in range(n) if not math.isnan(values[i])]
            obs_y = [y[i] for i in observed]
            ss_obs = _ss(obs_y)
            distinct = sorted({float(values[i]) for i in observed})
            for lo, hi in zip(distinct, distinct[1:]):
                cut = (lo + hi) / 2.0
                left = [i for i in observed if values[i] <= cut]
                right = [i for i in observed if values[i] > cut]
                improvement = (
                    ss_obs
                    - _ss([y[i] for i in left])
                    - _ss([y[i] for i in right])
                )
                consider(improvement, left, right)
        else:
            codes = feature.values
            observed = [i for i in range(n) if codes[i] >= 0]
            obs_y = [y[i] for i in observed]
            ss_obs = _ss(obs_y)
            present = sorted({int(codes[i]) for i in observed})
            if len(present) < 2:
                continue
            for size in range(1, len(present)):
                for subset in itertools.combinations(present, size):
                    chosen = set(subset)
                    left = [i for i in observed if codes[i] in chosen]
                    right = [i for i in observed if codes[i] not in chosen]
                    improvement = (
                        ss_obs
                        - _ss([y[i] for i in left])
                        - _ss([y[i] for i in right])
                    )
                    consider(improvement, left, right)
    if best is None:
        return None
    return best, partitions


def split_partition(tree, dataset):
    """The root split's observed-row partition of a fitted tree.

    Encoded the same way as the oracle's partitions; None when the
    root is a leaf.
    """
    root = tree.root
    if root.split is None:
        return None
    spec = root.split
    feature = dataset.features[spec.feature]
    n = len(dataset.y)
    left, right = [], []
    for i in range(n):
        value = feature.values[i]
        if feature.kind == "numeric":
            if math.isnan(value):
                continue
            goes_left = (value <= spec.threshold) == spec.left_if_le
            (left if goes_left else right).append(i)
        else:
            if value < 0:
                continue
            (left if int(value) in spec.left_levels else right).append(i)
    return frozenset((frozenset(left), frozenset(right))), spec.improvement
