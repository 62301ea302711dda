"""Bundle ingestion: CSV files plus a schema into typed tables.

Files are RFC 4180 CSV, UTF-8, with a mandatory header row.  The header
is matched against the declared column names order-insensitively; only
the empty string is an implicit missing marker.  Every other cell must
parse as the declared kind or match a declared sentinel, otherwise the
load fails loudly: silent coercion would hide exactly the data-quality
problems this toolkit exists to surface.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

from .errors import (
    CellParseError,
    ConflictingGroup,
    DuplicateColumn,
    FileMissing,
    HeaderMismatch,
    RaggedRow,
    UnknownFilterColumn,
)
from .model import ColumnMeta, RegistryTable
from .schema import CohortFilter, SchemaConfig, TableSpec


@dataclass(frozen=True)
class MultiSourceGroup:
    """Columns of one table that store the same quantity per provider."""

    table: str
    key: str
    members: tuple[tuple[str, str], ...]  # (provider, column name)


def _parse_cell(
    text: str, meta: ColumnMeta, table: str, row: int
) -> object:
    """Parse one raw cell; None for missing, str for sentinels."""
    if text == "":
        return None
    if text in meta.sentinels:
        return text
    if meta.kind == "numeric":
        try:
            value = float(text)
        except ValueError:
            raise CellParseError(
                table, meta.name, row, text, "not a number"
            ) from None
        if not math.isfinite(value):
            raise CellParseError(table, meta.name, row, text, "not finite")
        return value
    if meta.kind == "relative_date":
        try:
            return int(text)
        except ValueError:
            raise CellParseError(
                table, meta.name, row, text, "not an integer day offset"
            ) from None
    return text


def load_table(spec: TableSpec, path: str) -> RegistryTable:
    """Load one declared table from its CSV file."""
    if not os.path.exists(path):
        raise FileMissing(f"table {spec.name!r}: file not found: {path}")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatch(
                f"table {spec.name!r}: file {path} has no header row"
            ) from None
        seen: set[str] = set()
        for name in header:
            if name in seen:
                raise DuplicateColumn(
                    f"table {spec.name!r}: header repeats column {name!r}"
                )
            seen.add(name)
        declared = [c.name for c in spec.columns]
        expected = set(declared) | set(spec.ignore_columns)
        missing = set(declared) - seen
        extra = seen - expected
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"missing columns {sorted(missing)}")
            if extra:
                parts.append(f"undeclared columns {sorted(extra)}")
            raise HeaderMismatch(
                f"table {spec.name!r}: header of {path} does not match "
                f"the schema ({'; '.join(parts)})"
            )
        positions = {name: i for i, name in enumerate(header)}
        keep = [(meta, positions[meta.name]) for meta in spec.columns]
        columns: list[list[object]] = [[] for _ in spec.columns]
        width = len(header)
        for row_no, record in enumerate(reader, start=1):
            if not record and width == 1:
                # a one-column row whose single cell is empty serializes
                # as a blank line; reading it back must restore the row
                record = [""]
            if len(record) != width:
                raise RaggedRow(
                    f"table {spec.name!r} row {row_no}: {len(record)} cells, "
                    f"header has {width}"
                )
            for slot, (meta, pos) in enumerate(keep):
                columns[slot].append(
                    _parse_cell(record[pos], meta, spec.name, row_no)
                )
    return RegistryTable(spec.name, spec.columns, columns)


def load_bundle(config: SchemaConfig) -> dict[str, RegistryTable]:
    """Load every declared table; apply the cohort filter if present.

    Returns tables keyed by name, in declaration order.
    """
    tables = {
        spec.name: load_table(spec, config.table_path(spec))
        for spec in config.tables
    }
    if config.cohort is not None:
        tables = apply_cohort_filter(tables, config.cohort)
    return tables


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(table: RegistryTable, path: str) -> None:
    """Write a table back to CSV; a reload yields identical cells."""
    # temp file plus rename, so readers never see a half-written table
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([meta.name for meta in table.columns])
        columns = [table.column(meta.name) for meta in table.columns]
        for i in range(table.n_rows):
            writer.writerow([_format_cell(col[i]) for col in columns])
    os.replace(tmp, path)


def _suffix_groups(
    spec: TableSpec, providers: tuple[str, ...]
) -> dict[str, list[ColumnMeta]]:
    """Group unkeyed columns named <prefix>_<provider> by prefix."""
    by_prefix: dict[str, list[ColumnMeta]] = {}
    for meta in spec.columns:
        if meta.group is not None or meta.structural:
            continue
        for provider in providers:
            suffix = f"_{provider}"
            if meta.name.endswith(suffix) and len(meta.name) > len(suffix):
                if provider == meta.provider:
                    prefix = meta.name[: -len(suffix)]
                    by_prefix.setdefault(prefix, []).append(meta)
                break
    return by_prefix


def discover_multisource_groups(
    config: SchemaConfig, suffix_fallback: bool = True
) -> list[MultiSourceGroup]:
    """Resolve multi-source groups from keys, then from name suffixes.

    Explicitly keyed columns always form groups.  When suffix_fallback
    is on, unkeyed columns named <prefix>_<provider> are grouped by
    prefix; prefixes reaching fewer than two providers stay ungrouped.
    Output order follows table and column declaration order, so the
    result does not depend on anything but the config itself.
    """
    groups: list[MultiSourceGroup] = []
    for spec in config.tables:
        keyed: dict[str, list[ColumnMeta]] = {}
        for meta in spec.columns:
            if meta.group is not None:
                keyed.setdefault(meta.group, []).append(meta)
        candidates = list(keyed.items())
        if suffix_fallback:
            suffix = _suffix_groups(spec, config.providers)
            for prefix, members in suffix.items():
                if prefix in keyed:
                    raise ConflictingGroup(
                        f"table {spec.name!r}: suffix group {prefix!r} "
                        "collides with an explicit group key"
                    )
                if len(members) >= 2:
                    candidates.append((prefix, members))
        for key, members in candidates:
            providers = [m.provider for m in members]
            if len(set(providers)) != len(providers):
                raise ConflictingGroup(
                    f"table {spec.name!r}, group {key!r}: multiple columns "
                    "from one provider"
                )
            ordered = sorted(
                members, key=lambda m: config.providers.index(m.provider)
            )
            groups.append(
                MultiSourceGroup(
                    table=spec.name,
                    key=key,
                    members=tuple((m.provider, m.name) for m in ordered),
                )
            )
    groups.sort(key=lambda g: (g.table, g.key))
    return groups


def _rule_matches(value: object, op: str, literal: object) -> bool:
    """Evaluate one filter conjunct; missing cells never match."""
    if value is None:
        return False
    if op == "in":
        options = literal if isinstance(literal, list) else [literal]
        return any(_rule_matches(value, "==", opt) for opt in options)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        try:
            other = float(literal)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            return False
        number = float(value)
        if op == "==":
            return number == other
        if op == "!=":
            return number != other
        if op == ">=":
            return number >= other
        if op == "<=":
            return number <= other
        if op == ">":
            return number > other
        return number < other
    text = str(value)
    other_text = str(literal)
    if op == "==":
        return text == other_text
    if op == "!=":
        return text != other_text
    if op == ">=":
        return text >= other_text
    if op == "<=":
        return text <= other_text
    if op == ">":
        return text > other_text
    return text < other_text


def _keep_rows(table: RegistryTable, keep: list[int]) -> RegistryTable:
    cells = [
        [table.column(meta.name)[i] for i in keep] for meta in table.columns
    ]
    return RegistryTable(table.name, table.columns, cells)


def apply_cohort_filter(
    tables: dict[str, RegistryTable], cohort: CohortFilter
) -> dict[str, RegistryTable]:
    """Drop anchor rows failing any conjunct; restrict dependents by id.

    A missing cell fails every conjunct, so filtered rows always have
    the filter columns observed.
    """
    anchor = tables.get(cohort.table)
    if anchor is None:
        raise UnknownFilterColumn(f"cohort: no table {cohort.table!r} loaded")
    rule_columns = {}
    for rule in cohort.rules:
        rule_columns[rule.column] = anchor.column(rule.column)
    keep = [
        i
        for i in range(anchor.n_rows)
        if all(
            _rule_matches(rule_columns[rule.column][i], rule.op, rule.value)
            for rule in cohort.rules
        )
    ]
    out = dict(tables)
    out[cohort.table] = _keep_rows(anchor, keep)
    if cohort.propagate_to:
        ids = {
            anchor.column(cohort.id_column)[i]
            for i in keep
            if anchor.column(cohort.id_column)[i] is not None
        }
        for dep_name, dep_id_col in cohort.propagate_to:
            dep = tables[dep_name]
            dep_ids = dep.column(dep_id_col)
            dep_keep = [
                i for i in range(dep.n_rows) if dep_ids[i] in ids
            ]
            out[dep_name] = _keep_rows(dep, dep_keep)
    return out
