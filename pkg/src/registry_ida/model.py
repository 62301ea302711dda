"""Core data model: typed columns, provider attribution, tables.

A table holds parsed cell values column-major.  Missing is always
``None``; empty string is the only implicit missing marker and is never
stored.  Sentinel codes are observed values: they survive parsing as
strings even inside numeric columns, count as observed for missingness
purposes, and are skipped when numeric values are needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DuplicateColumn, InvalidConfig, UnknownColumn

COLUMN_KINDS = ("numeric", "categorical", "identifier", "relative_date")

# Kinds whose parsed values are usable as numbers.
NUMERIC_KINDS = ("numeric", "relative_date")


@dataclass(frozen=True)
class ColumnMeta:
    """Declared properties of one column.

    Args:
        name: Column name as it appears in the file header.
        kind: One of ``numeric``, ``categorical``, ``identifier``,
            ``relative_date``.
        provider: Name of the data provider the column is attributed to.
        sentinels: Literal cell texts that are kept as observed sentinel
            codes instead of being parsed as the declared kind.
        structural: True for housekeeping columns (row keys, join keys)
            that are excluded from every provider column set.
        group: Key shared by columns that store the same real-world
            quantity as reported by different providers.
    """

    name: str
    kind: str
    provider: str
    sentinels: tuple[str, ...] = ()
    structural: bool = False
    group: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in COLUMN_KINDS:
            raise InvalidConfig(
                f"column {self.name!r}: unknown kind {self.kind!r}"
            )


class RegistryTable:
    """Immutable typed table with provider-aware row and column sets.

    Cell values are ``float`` (numeric), ``int`` (relative_date, signed
    days), ``str`` (categorical, identifier, or any sentinel code), or
    ``None`` for missing.
    """

    def __init__(
        self,
        name: str,
        columns: Sequence[ColumnMeta],
        cells: Sequence[Sequence[object]],
    ):
        if len(columns) != len(cells):
            raise InvalidConfig(
                f"table {name!r}: {len(columns)} columns declared but "
                f"{len(cells)} cell columns supplied"
            )
        seen: set[str] = set()
        for meta in columns:
            if meta.name in seen:
                raise DuplicateColumn(f"table {name!r}: column {meta.name!r}")
            seen.add(meta.name)
        n_rows = len(cells[0]) if cells else 0
        for meta, col in zip(columns, cells):
            if len(col) != n_rows:
                raise InvalidConfig(
                    f"table {name!r}: column {meta.name!r} has {len(col)} "
                    f"rows, expected {n_rows}"
                )
        self.name = name
        self.columns = tuple(columns)
        self.n_rows = n_rows
        self.n_cols = len(self.columns)
        self._cells = tuple(tuple(col) for col in cells)
        self._index = {meta.name: i for i, meta in enumerate(self.columns)}
        if self.n_cols:
            mask = np.column_stack(
                [
                    np.fromiter(
                        (v is None for v in col), dtype=bool, count=n_rows
                    )
                    for col in self._cells
                ]
            )
        else:
            mask = np.zeros((n_rows, 0), dtype=bool)
        mask.setflags(write=False)
        self._missing = mask
        self._provider_cols: dict[str, tuple[int, ...]] = {}
        for i, meta in enumerate(self.columns):
            if meta.structural:
                continue
            self._provider_cols.setdefault(meta.provider, ())
            self._provider_cols[meta.provider] += (i,)
        self._provider_rows: dict[str, np.ndarray] = {}

    @classmethod
    def from_mapping(
        cls,
        name: str,
        columns: Sequence[ColumnMeta],
        values: Mapping[str, Sequence[object]],
    ) -> "RegistryTable":
        """Build a table from a column-name-to-values mapping."""
        missing = [m.name for m in columns if m.name not in values]
        if missing:
            raise InvalidConfig(f"table {name!r}: no values for {missing}")
        return cls(name, columns, [values[m.name] for m in columns])

    @property
    def missing_mask(self) -> np.ndarray:
        """Boolean array of shape (n_rows, n_cols), True where missing."""
        return self._missing

    @property
    def providers(self) -> tuple[str, ...]:
        """Providers with at least one non-structural column, sorted."""
        return tuple(sorted(self._provider_cols))

    def column_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownColumn(f"table {self.name!r}: no column {name!r}")

    def meta(self, name: str) -> ColumnMeta:
        return self.columns[self.column_index(name)]

    def column(self, name: str) -> tuple:
        """All cell values of one column, missing as None."""
        return self._cells[self.column_index(name)]

    def provider_columns(self, provider: str) -> tuple[int, ...]:
        """Indices of the provider's non-structural columns.

        Empty when the provider contributes nothing to this table.
        """
        return self._provider_cols.get(provider, ())

    def provider_rows(self, provider: str) -> np.ndarray:
        """Row mask of the provider's observation set.

        A row belongs to the set when at least one of the provider's
        columns is observed there.  All-False when the provider has no
        columns in this table.
        """
        cached = self._provider_rows.get(provider)
        if cached is not None:
            return cached
        cols = self.provider_columns(provider)
        if cols:
            mask = ~self._missing[:, list(cols)].all(axis=1)
        else:
            mask = np.zeros(self.n_rows, dtype=bool)
        mask.setflags(write=False)
        self._provider_rows[provider] = mask
        return mask

    def numeric_array(self, name: str) -> np.ndarray:
        """Column as float array, NaN where missing or sentinel.

        Only meaningful for numeric and relative_date columns; string
        cells (sentinel codes) are mapped to NaN so numeric summaries
        never mix codes with measurements.
        """
        col = self.column(name)
        out = np.full(self.n_rows, np.nan)
        for i, v in enumerate(col):
            if isinstance(v, (int, float)):
                out[i] = float(v)
        return out

    def string_array(self, name: str) -> list[str | None]:
        """Column as label strings, None where missing.

        Numeric cells are rendered with repr so categorical treatment
        of a numeric column stays deterministic.
        """
        out: list[str | None] = []
        for v in self.column(name):
            if v is None:
                out.append(None)
            elif isinstance(v, str):
                out.append(v)
            else:
                out.append(repr(v))
        return out


def provider_column_set(table: RegistryTable, provider: str) -> tuple[int, ...]:
    """C(provider): indices of the provider's columns in the table."""
    return table.provider_columns(provider)


def provider_observation_set(table: RegistryTable, provider: str) -> np.ndarray:
    """I(provider): rows where the provider observes at least one cell."""
    return table.provider_rows(provider)
