"""Schema configuration: a YAML document describing a bundle.

The document declares providers, tables with typed provider-attributed
columns, optional multi-source group keys, an optional cohort filter,
and an optional event-time section that names the columns the outcome
derivation reads.  Example:

    providers: [ET, DSO, IQTIG]
    tables:
      - name: recipients
        file: recipients.csv
        columns:
          - {name: recipient_id, kind: identifier, provider: ET,
             structural: true}
          - {name: weight_ET, kind: numeric, provider: ET, group: weight}
          - {name: weight_DSO, kind: numeric, provider: DSO, group: weight}
          - {name: serology, kind: categorical, provider: DSO,
             sentinels: ["not tested"]}
        ignore_columns: [legacy_code]
    cohort:
      table: recipients
      where:
        - {column: age, op: ">=", value: 18}
      id_column: recipient_id
      propagate_to:
        - {table: transplants, id_column: recipient_id}
    eventtime:
      recipient_id: recipient_id
      transplantation:
        table: transplants
        tx_date: tx_date
        reported_lfud: reported_lfud
        graft_failure_date: et_graft_failure
      recipient:
        table: recipients
        death_date: et_death_date
      followup:
        table: followups
        date_columns: [fu_date]
        death_date_columns: [fu_death_date]
        failure_date_columns: [fu_failure_date]
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import yaml

from .errors import (
    ConflictingGroup,
    InvalidConfig,
    UnknownFilterColumn,
)
from .model import COLUMN_KINDS, ColumnMeta

COHORT_OPS = ("==", "!=", ">=", "<=", ">", "<", "in")


@dataclass(frozen=True)
class CohortRule:
    """One conjunct of the cohort filter: column OP value."""

    column: str
    op: str
    value: object


@dataclass(frozen=True)
class CohortFilter:
    """Row filter on an anchor table, propagated to dependents by id."""

    table: str
    rules: tuple[CohortRule, ...]
    id_column: str | None = None
    propagate_to: tuple[tuple[str, str], ...] = ()  # (table, id_column)


@dataclass(frozen=True)
class EventTimeConfig:
    """Column names the event-time derivation reads."""

    recipient_id: str
    tx_table: str
    tx_date: str
    reported_lfud: str | None = None
    graft_failure_date: str | None = None
    recipient_table: str | None = None
    death_date: str | None = None
    followup_table: str | None = None
    fu_date_columns: tuple[str, ...] = ()
    fu_death_columns: tuple[str, ...] = ()
    fu_failure_columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class TableSpec:
    """One declared table: file location plus column declarations."""

    name: str
    file: str
    columns: tuple[ColumnMeta, ...]
    ignore_columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class SchemaConfig:
    """Parsed and validated schema configuration."""

    providers: tuple[str, ...]
    tables: tuple[TableSpec, ...]
    cohort: CohortFilter | None = None
    eventtime: EventTimeConfig | None = None
    base_dir: str = "."
    source_path: str | None = None

    def table(self, name: str) -> TableSpec:
        for spec in self.tables:
            if spec.name == name:
                return spec
        raise InvalidConfig(f"no table named {name!r} in schema")

    def table_path(self, spec: TableSpec) -> str:
        return os.path.join(self.base_dir, spec.file)


def _require(mapping: dict, key: str, where: str) -> object:
    if key not in mapping:
        raise InvalidConfig(f"{where}: missing required key {key!r}")
    return mapping[key]


def _as_str_list(value: object, where: str) -> list[str]:
    if not isinstance(value, list) or not all(
        isinstance(v, str) for v in value
    ):
        raise InvalidConfig(f"{where}: expected a list of strings")
    return value


def _parse_column(raw: object, where: str, providers: set[str]) -> ColumnMeta:
    if not isinstance(raw, dict):
        raise InvalidConfig(f"{where}: column entry must be a mapping")
    name = _require(raw, "name", where)
    kind = _require(raw, "kind", f"{where}.{name}")
    provider = _require(raw, "provider", f"{where}.{name}")
    if kind not in COLUMN_KINDS:
        raise InvalidConfig(
            f"{where}.{name}: kind must be one of {COLUMN_KINDS}, got {kind!r}"
        )
    if provider not in providers:
        raise InvalidConfig(
            f"{where}.{name}: provider {provider!r} is not declared"
        )
    sentinels = raw.get("sentinels", [])
    sentinels = tuple(_as_str_list(sentinels, f"{where}.{name}.sentinels"))
    if "" in sentinels:
        raise InvalidConfig(
            f"{where}.{name}: empty string cannot be a sentinel, it is "
            "the missing marker"
        )
    group = raw.get("group")
    if group is not None and not isinstance(group, str):
        raise InvalidConfig(f"{where}.{name}: group must be a string")
    structural = bool(raw.get("structural", False))
    known = {"name", "kind", "provider", "sentinels", "group", "structural"}
    extra = set(raw) - known
    if extra:
        raise InvalidConfig(f"{where}.{name}: unknown keys {sorted(extra)}")
    return ColumnMeta(
        name=name,
        kind=kind,
        provider=provider,
        sentinels=sentinels,
        structural=structural,
        group=group,
    )


def _validate_groups(spec: TableSpec) -> None:
    members: dict[str, list[ColumnMeta]] = {}
    for meta in spec.columns:
        if meta.group is not None:
            members.setdefault(meta.group, []).append(meta)
    for key, cols in members.items():
        providers = [c.provider for c in cols]
        if len(set(providers)) != len(providers):
            raise ConflictingGroup(
                f"table {spec.name!r}, group {key!r}: multiple columns "
                "from one provider"
            )
        if len(cols) < 2:
            raise InvalidConfig(
                f"table {spec.name!r}, group {key!r}: a multi-source group "
                "needs at least two columns from distinct providers"
            )


def _parse_cohort(raw: object, config_tables: dict[str, TableSpec]) -> CohortFilter:
    if not isinstance(raw, dict):
        raise InvalidConfig("cohort: must be a mapping")
    # a typo like "rules" instead of "where" must not silently keep all rows
    known = {"table", "where", "id_column", "propagate_to"}
    extra = set(raw) - known
    if extra:
        raise InvalidConfig(f"cohort: unknown keys {sorted(extra)}")
    table = _require(raw, "table", "cohort")
    if table not in config_tables:
        raise InvalidConfig(f"cohort: unknown table {table!r}")
    spec = config_tables[table]
    declared = {c.name for c in spec.columns}
    rules = []
    for entry in raw.get("where", []):
        if not isinstance(entry, dict):
            raise InvalidConfig("cohort.where: entries must be mappings")
        column = _require(entry, "column", "cohort.where")
        op = _require(entry, "op", "cohort.where")
        value = _require(entry, "value", "cohort.where")
        if column not in declared:
            raise UnknownFilterColumn(
                f"cohort filter on {table!r}: no column {column!r}"
            )
        if op not in COHORT_OPS:
            raise InvalidConfig(
                f"cohort.where: op must be one of {COHORT_OPS}, got {op!r}"
            )
        rules.append(CohortRule(column=column, op=op, value=value))
    id_column = raw.get("id_column")
    propagate = []
    for entry in raw.get("propagate_to", []):
        if not isinstance(entry, dict):
            raise InvalidConfig("cohort.propagate_to: entries must be mappings")
        dep_table = _require(entry, "table", "cohort.propagate_to")
        dep_id = _require(entry, "id_column", "cohort.propagate_to")
        if dep_table not in config_tables:
            raise InvalidConfig(
                f"cohort.propagate_to: unknown table {dep_table!r}"
            )
        dep_declared = {c.name for c in config_tables[dep_table].columns}
        if dep_id not in dep_declared:
            raise UnknownFilterColumn(
                f"cohort propagation to {dep_table!r}: no column {dep_id!r}"
            )
        propagate.append((dep_table, dep_id))
    if propagate and id_column is None:
        raise InvalidConfig("cohort: propagate_to requires id_column")
    if id_column is not None and id_column not in declared:
        raise UnknownFilterColumn(
            f"cohort filter on {table!r}: no id column {id_column!r}"
        )
    return CohortFilter(
        table=table,
        rules=tuple(rules),
        id_column=id_column,
        propagate_to=tuple(propagate),
    )


def _check_column(
    tables: dict[str, TableSpec], table: str, column: str, where: str,
    kind: str | None = None,
) -> None:
    spec = tables[table]
    for meta in spec.columns:
        if meta.name == column:
            if kind is not None and meta.kind != kind:
                raise InvalidConfig(
                    f"{where}: column {table}.{column} must have kind "
                    f"{kind!r}, got {meta.kind!r}"
                )
            return
    raise InvalidConfig(f"{where}: table {table!r} has no column {column!r}")


def _parse_eventtime(
    raw: object, tables: dict[str, TableSpec]
) -> EventTimeConfig:
    if not isinstance(raw, dict):
        raise InvalidConfig("eventtime: must be a mapping")
    known = {"recipient_id", "transplantation", "recipient", "followup"}
    extra = set(raw) - known
    if extra:
        raise InvalidConfig(f"eventtime: unknown keys {sorted(extra)}")
    rid = _require(raw, "recipient_id", "eventtime")
    tx = _require(raw, "transplantation", "eventtime")
    if not isinstance(tx, dict):
        raise InvalidConfig("eventtime.transplantation: must be a mapping")
    tx_table = _require(tx, "table", "eventtime.transplantation")
    if tx_table not in tables:
        raise InvalidConfig(f"eventtime: unknown table {tx_table!r}")
    tx_date = _require(tx, "tx_date", "eventtime.transplantation")
    _check_column(tables, tx_table, rid, "eventtime")
    _check_column(tables, tx_table, tx_date, "eventtime", "relative_date")
    reported_lfud = tx.get("reported_lfud")
    if reported_lfud is not None:
        _check_column(
            tables, tx_table, reported_lfud, "eventtime", "relative_date"
        )
    gfd = tx.get("graft_failure_date")
    if gfd is not None:
        _check_column(tables, tx_table, gfd, "eventtime", "relative_date")

    recipient_table = None
    death_date = None
    rec = raw.get("recipient")
    if rec is not None:
        if not isinstance(rec, dict):
            raise InvalidConfig("eventtime.recipient: must be a mapping")
        recipient_table = _require(rec, "table", "eventtime.recipient")
        if recipient_table not in tables:
            raise InvalidConfig(
                f"eventtime: unknown table {recipient_table!r}"
            )
        death_date = _require(rec, "death_date", "eventtime.recipient")
        _check_column(tables, recipient_table, rid, "eventtime")
        _check_column(
            tables, recipient_table, death_date, "eventtime", "relative_date"
        )

    followup_table = None
    fu_dates: tuple[str, ...] = ()
    fu_deaths: tuple[str, ...] = ()
    fu_failures: tuple[str, ...] = ()
    fu = raw.get("followup")
    if fu is not None:
        if not isinstance(fu, dict):
            raise InvalidConfig("eventtime.followup: must be a mapping")
        followup_table = _require(fu, "table", "eventtime.followup")
        if followup_table not in tables:
            raise InvalidConfig(f"eventtime: unknown table {followup_table!r}")
        _check_column(tables, followup_table, rid, "eventtime")
        fu_dates = tuple(
            _as_str_list(fu.get("date_columns", []), "eventtime.followup")
        )
        fu_deaths = tuple(
            _as_str_list(
                fu.get("death_date_columns", []), "eventtime.followup"
            )
        )
        fu_failures = tuple(
            _as_str_list(
                fu.get("failure_date_columns", []), "eventtime.followup"
            )
        )
        for col in fu_dates + fu_deaths + fu_failures:
            _check_column(
                tables, followup_table, col, "eventtime", "relative_date"
            )
    return EventTimeConfig(
        recipient_id=rid,
        tx_table=tx_table,
        tx_date=tx_date,
        reported_lfud=reported_lfud,
        graft_failure_date=gfd,
        recipient_table=recipient_table,
        death_date=death_date,
        followup_table=followup_table,
        fu_date_columns=fu_dates,
        fu_death_columns=fu_deaths,
        fu_failure_columns=fu_failures,
    )


def parse_schema(document: dict, base_dir: str = ".") -> SchemaConfig:
    """Validate a parsed YAML document into a SchemaConfig."""
    if not isinstance(document, dict):
        raise InvalidConfig("schema: top level must be a mapping")
    providers = _as_str_list(
        _require(document, "providers", "schema"), "providers"
    )
    if not providers:
        raise InvalidConfig("schema: provider list is empty")
    if len(set(providers)) != len(providers):
        raise InvalidConfig("schema: duplicate provider names")
    provider_set = set(providers)

    raw_tables = _require(document, "tables", "schema")
    if not isinstance(raw_tables, list) or not raw_tables:
        raise InvalidConfig("schema: tables must be a non-empty list")
    specs: dict[str, TableSpec] = {}
    for raw in raw_tables:
        if not isinstance(raw, dict):
            raise InvalidConfig("schema: table entry must be a mapping")
        name = _require(raw, "name", "tables")
        if name in specs:
            raise InvalidConfig(f"schema: duplicate table name {name!r}")
        file = raw.get("file", f"{name}.csv")
        columns = [
            _parse_column(c, f"table {name}", provider_set)
            for c in _require(raw, "columns", f"table {name}")
        ]
        if not columns:
            raise InvalidConfig(f"table {name!r}: no columns declared")
        ignore = tuple(
            _as_str_list(
                raw.get("ignore_columns", []), f"table {name}.ignore_columns"
            )
        )
        declared = [c.name for c in columns]
        clash = set(declared) & set(ignore)
        if clash:
            raise InvalidConfig(
                f"table {name!r}: columns {sorted(clash)} both declared "
                "and ignored"
            )
        spec = TableSpec(
            name=name, file=file, columns=tuple(columns), ignore_columns=ignore
        )
        _validate_groups(spec)
        specs[name] = spec

    cohort = None
    if document.get("cohort") is not None:
        cohort = _parse_cohort(document["cohort"], specs)
    eventtime = None
    if document.get("eventtime") is not None:
        eventtime = _parse_eventtime(document["eventtime"], specs)

    known = {"providers", "tables", "cohort", "eventtime"}
    extra = set(document) - known
    if extra:
        raise InvalidConfig(f"schema: unknown top-level keys {sorted(extra)}")
    return SchemaConfig(
        providers=tuple(providers),
        tables=tuple(specs.values()),
        cohort=cohort,
        eventtime=eventtime,
        base_dir=base_dir,
    )


def load_schema(path: str) -> SchemaConfig:
    """Read and validate a schema configuration file."""
    if not os.path.exists(path):
        raise InvalidConfig(f"schema file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            document = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise InvalidConfig(f"schema file {path}: {exc}") from exc
    config = parse_schema(document, base_dir=os.path.dirname(path) or ".")
    return SchemaConfig(
        providers=config.providers,
        tables=config.tables,
        cohort=config.cohort,
        eventtime=config.eventtime,
        base_dir=config.base_dir,
        source_path=path,
    )
