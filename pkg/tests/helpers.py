"""Shared table-building helpers for the test suite."""

from __future__ import annotations

import numpy as np

from registry_ida.model import ColumnMeta, RegistryTable

PROVIDERS = ("ET", "DSO", "IQTIG")


def make_table(name: str, spec: list[tuple], n_rows: int) -> RegistryTable:
    """Build a table from (column_name, kind, provider, cells[, extra]) rows.

    ``extra`` is an optional dict forwarded to ColumnMeta (sentinels,
    structural, group).
    """
    metas = []
    values = {}
    for item in spec:
        col_name, kind, provider, cells = item[:4]
        extra = item[4] if len(item) > 4 else {}
        metas.append(ColumnMeta(name=col_name, kind=kind, provider=provider, **extra))
        assert len(cells) == n_rows, col_name
        values[col_name] = list(cells)
    return RegistryTable.from_mapping(name, metas, values)


def random_table(rng: np.random.Generator, name: str = "t") -> RegistryTable:
    """Random small table: mixed kinds, providers, and missingness.

    Shapes match the corpus bounds used by the oracle-equivalence
    checks: at most 50 rows and 10 non-structural columns over three
    providers.  Sentinel codes are planted in some numeric columns so
    the observed-but-unusable case stays exercised.
    """
    n = int(rng.integers(1, 51))
    n_cols = int(rng.integers(1, 11))
    spec: list[tuple] = []
    for j in range(n_cols):
        provider = PROVIDERS[int(rng.integers(0, 3))]
        kind_pick = rng.random()
        missing_rate = float(rng.random()) * 0.9
        sentinels: tuple[str, ...] = ()
        if kind_pick < 0.45:
            kind = "numeric"
            cells: list[object] = [
                round(float(v), 3) for v in rng.normal(0, 1, n)
            ]
            if rng.random() < 0.3:
                sentinels = ("-999",)
                for i in range(n):
                    if rng.random() < 0.1:
                        cells[i] = "-999"
        elif kind_pick < 0.8:
            kind = "categorical"
            levels = ["a", "b", "c", "d"][: int(rng.integers(2, 5))]
            cells = [levels[int(k)] for k in rng.integers(0, len(levels), n)]
        else:
            kind = "relative_date"
            cells = [int(v) for v in rng.integers(0, 5000, n)]
        cells = [
            None if rng.random() < missing_rate else cells[i] for i in range(n)
        ]
        spec.append(
            (f"c{j}", kind, provider, cells, {"sentinels": sentinels})
        )
    if rng.random() < 0.5:
        ids = [f"id{i}" for i in range(n)]
        spec.insert(
            0, ("rid", "identifier", "ET", ids, {"structural": True})
        )
    return make_table(name, spec, n)
