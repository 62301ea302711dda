"""Synthetic registry bundles with known ground truth.

The generator emits CSV tables plus the schema config that describes
them, and a ground-truth ledger recording what was planted: the true
missingness mechanism of every column, the true agreement level of
every multi-source group, and per recipient the true event time and
which providers reported it.  Analysis results can then be checked
against the ledger instead of against opaque expectations.

All randomness flows through one numpy default_rng stream (PCG64),
seeded from the config; the seed is mandatory.  Same seed, same bytes,
within this implementation.

Missingness mechanisms: ``mcar`` erases cells independently at a fixed
rate; ``type_driven`` and ``center_driven`` erase at a rate looked up
from the row's value in a driver column of the same table (one routine,
two names, because observation-type and center columns are the two
drivers worth planting separately).  Group agreement for numeric
members blends a shared latent value with per-provider noise,
member = a * latent + (1 - a) * noise, so agreement 1 gives identical
columns and agreement 0 gives independent ones; categorical members
redraw the shared level with probability (1 - a).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
import yaml

from .errors import InvalidConfig
from .ingest import write_table
from .model import ColumnMeta, RegistryTable
from .output import atomic_write_text

MECHANISMS = ("mcar", "type_driven", "center_driven")
COLUMN_KINDS = ("numeric", "categorical")

# Survival tables use fixed column names; the emitted schema wires them
# into its eventtime section.
SURVIVAL_RECIPIENTS = "recipients"
SURVIVAL_TRANSPLANTS = "transplants"
SURVIVAL_FOLLOWUPS = "followups"


@dataclass(frozen=True)
class Mechanism:
    kind: str
    rate: float = 0.0
    driver: str | None = None
    rates: dict | None = None


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    provider: str
    kind: str
    levels: tuple[str, ...] = ()
    mechanism: Mechanism = Mechanism("mcar", 0.0)


@dataclass(frozen=True)
class TableSpecSynth:
    name: str
    n_rows: int
    columns: tuple[ColumnSpec, ...]


@dataclass(frozen=True)
class GroupSpec:
    table: str
    key: str
    kind: str
    providers: tuple[str, ...]
    agreement: float
    missing_rates: dict
    levels: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProviderReporting:
    event_prob: float = 1.0
    lfud_prob: float = 0.0
    lfud_max_days: int = 1095
    followup_prob: float = 0.0


@dataclass(frozen=True)
class SurvivalSpec:
    event_rate_per_year: float
    death_fraction: float = 0.5
    followup_interval_days: int = 365
    followup_noise_days: int = 20
    et: ProviderReporting = ProviderReporting()
    iqtig: ProviderReporting = ProviderReporting()


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    n_recipients: int
    providers: tuple[str, ...]
    tables: tuple[TableSpecSynth, ...] = ()
    groups: tuple[GroupSpec, ...] = ()
    survival: SurvivalSpec | None = None


def _fail(path: str, message: str) -> InvalidConfig:
    return InvalidConfig(f"synth config: {path}: {message}")


def _rate(value: object, path: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise _fail(path, "must be a number")
    if not 0.0 <= float(value) <= 1.0:
        raise _fail(path, "must be in [0, 1]")
    return float(value)


def _parse_mechanism(raw: object, path: str) -> Mechanism:
    if raw is None:
        return Mechanism("mcar", 0.0)
    if not isinstance(raw, dict):
        raise _fail(path, "must be a mapping")
    kind = raw.get("kind")
    if kind not in MECHANISMS:
        raise _fail(f"{path}.kind", f"must be one of {MECHANISMS}")
    if kind == "mcar":
        return Mechanism("mcar", _rate(raw.get("rate", 0.0), f"{path}.rate"))
    driver = raw.get("driver")
    if not isinstance(driver, str):
        raise _fail(f"{path}.driver", "must name a column in the same table")
    rates = raw.get("rates")
    if not isinstance(rates, dict) or not rates:
        raise _fail(f"{path}.rates", "must map driver levels to rates")
    parsed = {
        str(level): _rate(rate, f"{path}.rates[{level}]")
        for level, rate in rates.items()
    }
    return Mechanism(kind, driver=driver, rates=parsed)


def parse_synth_config(document: dict) -> SynthConfig:
    """Validate a YAML-shaped mapping into a SynthConfig."""
    if not isinstance(document, dict):
        raise _fail("$", "top level must be a mapping")
    if "seed" not in document:
        raise _fail("seed", "a seed is required; refusing to guess one")
    seed = document["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise _fail("seed", "must be an integer")
    n = document.get("n_recipients")
    if not isinstance(n, int) or n < 1:
        raise _fail("n_recipients", "must be a positive integer")
    providers = document.get("providers", ["ET", "DSO", "IQTIG"])
    if (
        not isinstance(providers, list)
        or not providers
        or len(set(providers)) != len(providers)
    ):
        raise _fail("providers", "must be a non-empty list of unique names")

    tables: list[TableSpecSynth] = []
    names_seen: set[str] = set()
    for t_idx, raw_table in enumerate(document.get("tables", [])):
        t_path = f"tables[{t_idx}]"
        if not isinstance(raw_table, dict):
            raise _fail(t_path, "must be a mapping")
        name = raw_table.get("name")
        if not isinstance(name, str) or not name:
            raise _fail(f"{t_path}.name", "must be a non-empty string")
        if name in names_seen:
            raise _fail(f"{t_path}.name", f"duplicate table {name!r}")
        names_seen.add(name)
        n_rows = raw_table.get("n_rows", n)
        if not isinstance(n_rows, int) or n_rows < 1:
            raise _fail(f"{t_path}.n_rows", "must be a positive integer")
        columns: list[ColumnSpec] = []
        col_names: set[str] = set()
        for c_idx, raw_col in enumerate(raw_table.get("columns", [])):
            c_path = f"{t_path}.columns[{c_idx}]"
            if not isinstance(raw_col, dict):
                raise _fail(c_path, "must be a mapping")
            c_name = raw_col.get("name")
            if not isinstance(c_name, str) or not c_name:
                raise _fail(f"{c_path}.name", "must be a non-empty string")
            if c_name in col_names:
                raise _fail(f"{c_path}.name", f"duplicate column {c_name!r}")
            col_names.add(c_name)
            provider = raw_col.get("provider")
            if provider not in providers:
                raise _fail(f"{c_path}.provider", "must be a declared provider")
            kind = raw_col.get("kind")
            if kind not in COLUMN_KINDS:
                raise _fail(f"{c_path}.kind", f"must be one of {COLUMN_KINDS}")
            levels: tuple[str, ...] = ()
            if kind == "categorical":
                raw_levels = raw_col.get("levels")
                if (
                    not isinstance(raw_levels, list)
                    or len(raw_levels) < 2
                    or not all(isinstance(v, str) for v in raw_levels)
                ):
                    raise _fail(
                        f"{c_path}.levels", "need at least two string levels"
                    )
                levels = tuple(raw_levels)
            mechanism = _parse_mechanism(
                raw_col.get("mechanism"), f"{c_path}.mechanism"
            )
            if mechanism.driver is not None:
                if mechanism.driver == c_name or mechanism.driver not in col_names:
                    raise _fail(
                        f"{c_path}.mechanism.driver",
                        f"column {mechanism.driver!r} must be declared "
                        "earlier in the same table",
                    )
            columns.append(
                ColumnSpec(
                    name=c_name,
                    provider=provider,
                    kind=kind,
                    levels=levels,
                    mechanism=mechanism,
                )
            )
        if not columns:
            raise _fail(f"{t_path}.columns", "must declare at least one column")
        tables.append(
            TableSpecSynth(name=name, n_rows=n_rows, columns=tuple(columns))
        )

    groups: list[GroupSpec] = []
    for g_idx, raw_group in enumerate(document.get("groups", [])):
        g_path = f"groups[{g_idx}]"
        if not isinstance(raw_group, dict):
            raise _fail(g_path, "must be a mapping")
        table = raw_group.get("table")
        if table not in names_seen:
            raise _fail(f"{g_path}.table", "must name a declared table")
        key = raw_group.get("key")
        if not isinstance(key, str) or not key:
            raise _fail(f"{g_path}.key", "must be a non-empty string")
        kind = raw_group.get("kind")
        if kind not in COLUMN_KINDS:
            raise _fail(f"{g_path}.kind", f"must be one of {COLUMN_KINDS}")
        g_providers = raw_group.get("providers")
        if (
            not isinstance(g_providers, list)
            or len(g_providers) < 2
            or not all(p in providers for p in g_providers)
            or len(set(g_providers)) != len(g_providers)
        ):
            raise _fail(
                f"{g_path}.providers",
                "need at least two distinct declared providers",
            )
        agreement = _rate(raw_group.get("agreement"), f"{g_path}.agreement")
        missing_rates = raw_group.get("missing_rates", {})
        if not isinstance(missing_rates, dict):
            raise _fail(f"{g_path}.missing_rates", "must be a mapping")
        parsed_rates = {
            str(p): _rate(r, f"{g_path}.missing_rates[{p}]")
            for p, r in missing_rates.items()
        }
        for p in parsed_rates:
            if p not in g_providers:
                raise _fail(
                    f"{g_path}.missing_rates", f"{p!r} is not in the group"
                )
        levels: tuple[str, ...] = ()
        if kind == "categorical":
            raw_levels = raw_group.get("levels")
            if (
                not isinstance(raw_levels, list)
                or len(raw_levels) < 2
                or not all(isinstance(v, str) for v in raw_levels)
            ):
                raise _fail(f"{g_path}.levels", "need at least two string levels")
            levels = tuple(raw_levels)
        groups.append(
            GroupSpec(
                table=table,
                key=key,
                kind=kind,
                providers=tuple(g_providers),
                agreement=agreement,
                missing_rates=parsed_rates,
                levels=levels,
            )
        )

    survival = None
    raw_survival = document.get("survival")
    if raw_survival is not None:
        s_path = "survival"
        if not isinstance(raw_survival, dict):
            raise _fail(s_path, "must be a mapping")
        rate = raw_survival.get("event_rate_per_year")
        if not isinstance(rate, (int, float)) or rate <= 0:
            raise _fail(f"{s_path}.event_rate_per_year", "must be positive")
        death_fraction = _rate(
            raw_survival.get("death_fraction", 0.5), f"{s_path}.death_fraction"
        )
        interval = raw_survival.get("followup_interval_days", 365)
        if not isinstance(interval, int) or interval < 1:
            raise _fail(
                f"{s_path}.followup_interval_days", "must be a positive integer"
            )
        noise = raw_survival.get("followup_noise_days", 20)
        if not isinstance(noise, int) or noise < 0 or noise >= interval:
            raise _fail(
                f"{s_path}.followup_noise_days",
                "must be a non-negative integer smaller than the interval",
            )

        def reporting(raw: object, path: str) -> ProviderReporting:
            if raw is None:
                return ProviderReporting()
            if not isinstance(raw, dict):
                raise _fail(path, "must be a mapping")
            lfud_max = raw.get("lfud_max_days", 1095)
            if not isinstance(lfud_max, int) or lfud_max < 0:
                raise _fail(
                    f"{path}.lfud_max_days", "must be a non-negative integer"
                )
            return ProviderReporting(
                event_prob=_rate(
                    raw.get("event_prob", 1.0), f"{path}.event_prob"
                ),
                lfud_prob=_rate(raw.get("lfud_prob", 0.0), f"{path}.lfud_prob"),
                lfud_max_days=lfud_max,
                followup_prob=_rate(
                    raw.get("followup_prob", 0.0), f"{path}.followup_prob"
                ),
            )

        for fixed in (
            SURVIVAL_RECIPIENTS,
            SURVIVAL_TRANSPLANTS,
            SURVIVAL_FOLLOWUPS,
        ):
            if fixed in names_seen:
                raise _fail(
                    s_path,
                    f"table name {fixed!r} is reserved for survival output",
                )
        survival = SurvivalSpec(
            event_rate_per_year=float(rate),
            death_fraction=death_fraction,
            followup_interval_days=interval,
            followup_noise_days=noise,
            et=reporting(raw_survival.get("et"), f"{s_path}.et"),
            iqtig=reporting(raw_survival.get("iqtig"), f"{s_path}.iqtig"),
        )
        for required in ("ET", "IQTIG"):
            if required not in providers:
                raise _fail(
                    "providers",
                    f"survival generation requires provider {required!r}",
                )

    known = {"seed", "n_recipients", "providers", "tables", "groups", "survival"}
    extra = set(document) - known
    if extra:
        raise _fail("$", f"unknown keys {sorted(extra)}")
    if not tables and survival is None:
        raise _fail("tables", "nothing to generate")
    return SynthConfig(
        seed=seed,
        n_recipients=n,
        providers=tuple(providers),
        tables=tuple(tables),
        groups=tuple(groups),
        survival=survival,
    )


def load_synth_config(path: str) -> SynthConfig:
    if not os.path.exists(path):
        raise InvalidConfig(f"synth config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            document = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise InvalidConfig(f"synth config {path}: {exc}") from exc
    return parse_synth_config(document)


@dataclass
class GeneratedBundle:
    tables: dict[str, RegistryTable]
    schema_document: dict
    ledger: dict


def _numeric_values(rng: np.random.Generator, n: int) -> list[float]:
    return [float(v) for v in np.round(rng.normal(50.0, 10.0, n), 4)]


def _categorical_values(
    rng: np.random.Generator, n: int, levels: tuple[str, ...]
) -> list[str]:
    idx = rng.integers(0, len(levels), n)
    return [levels[int(i)] for i in idx]


def _driver_rate_vector(
    driver_values: list, rates: dict, n: int
) -> np.ndarray:
    out = np.zeros(n)
    for i, v in enumerate(driver_values):
        if v is not None:
            out[i] = rates.get(str(v), 0.0)
    return out


def _apply_mask(values: list, mask: np.ndarray) -> list:
    return [None if mask[i] else values[i] for i in range(len(values))]


def _generate_generic_table(
    rng: np.random.Generator,
    spec: TableSpecSynth,
    groups: list[GroupSpec],
    ledger_columns: dict,
    ledger_groups: list,
) -> tuple[list[ColumnMeta], dict[str, list]]:
    n = spec.n_rows
    metas: list[ColumnMeta] = []
    cells: dict[str, list] = {}
    for col in spec.columns:
        if col.kind == "numeric":
            values = _numeric_values(rng, n)
        else:
            values = _categorical_values(rng, n, col.levels)
        mech = col.mechanism
        if mech.kind == "mcar":
            rate_vec = np.full(n, mech.rate)
        else:
            rate_vec = _driver_rate_vector(cells[mech.driver], mech.rates, n)
        mask = rng.random(n) < rate_vec
        cells[col.name] = _apply_mask(values, mask)
        metas.append(
            ColumnMeta(
                name=col.name,
                kind="numeric" if col.kind == "numeric" else "categorical",
                provider=col.provider,
            )
        )
        entry = {"mechanism": mech.kind}
        if mech.kind == "mcar":
            entry["rate"] = mech.rate
        else:
            entry["driver"] = mech.driver
            entry["rates"] = dict(sorted(mech.rates.items()))
        ledger_columns[f"{spec.name}.{col.name}"] = entry

    for group in groups:
        if group.table != spec.name:
            continue
        members = {}
        if group.kind == "numeric":
            latent = rng.normal(50.0, 10.0, n)
            for provider in group.providers:
                noise = rng.normal(50.0, 10.0, n)
                blended = group.agreement * latent + (1 - group.agreement) * noise
                values = [float(v) for v in np.round(blended, 4)]
                mask = rng.random(n) < group.missing_rates.get(provider, 0.0)
                name = f"{group.key}_{provider}"
                cells[name] = _apply_mask(values, mask)
                metas.append(
                    ColumnMeta(
                        name=name,
                        kind="numeric",
                        provider=provider,
                        group=group.key,
                    )
                )
                members[provider] = name
        else:
            levels = group.levels
            latent = rng.integers(0, len(levels), n)
            for provider in group.providers:
                redraw = rng.random(n) >= group.agreement
                fresh = rng.integers(0, len(levels), n)
                codes = np.where(redraw, fresh, latent)
                values = [levels[int(c)] for c in codes]
                mask = rng.random(n) < group.missing_rates.get(provider, 0.0)
                name = f"{group.key}_{provider}"
                cells[name] = _apply_mask(values, mask)
                metas.append(
                    ColumnMeta(
                        name=name,
                        kind="categorical",
                        provider=provider,
                        group=group.key,
                    )
                )
                members[provider] = name
        ledger_groups.append(
            {
                "table": group.table,
                "key": group.key,
                "kind": group.kind,
                "agreement": group.agreement,
                "members": members,
            }
        )
    return metas, cells


def _generate_survival(
    rng: np.random.Generator,
    config: SynthConfig,
    spec: SurvivalSpec,
) -> tuple[dict[str, tuple[list[ColumnMeta], dict[str, list]]], list[dict]]:
    n = config.n_recipients
    ids = [f"R{i:06d}" for i in range(1, n + 1)]
    tx_days = rng.integers(1000, 4001, n)
    event_years = rng.exponential(1.0 / spec.event_rate_per_year, n)
    event_offsets = np.maximum(1, np.rint(event_years * 365.25)).astype(np.int64)
    is_death = rng.random(n) < spec.death_fraction
    et_event = rng.random(n) < spec.et.event_prob
    et_has_lfud = rng.random(n) < spec.et.lfud_prob
    et_lfud_offset = rng.integers(0, spec.et.lfud_max_days + 1, n)
    iqtig_event = rng.random(n) < spec.iqtig.event_prob

    et_death: list[int | None] = [None] * n
    et_failure: list[int | None] = [None] * n
    reported_lfud: list[int | None] = [None] * n
    fu_rows: list[tuple[str, int, int | None, int | None]] = []
    recipients_ledger: list[dict] = []

    max_fu_offset = 3 * spec.followup_interval_days
    for i in range(n):
        tx = int(tx_days[i])
        event_offset = int(event_offsets[i])
        event_day = tx + event_offset
        death = bool(is_death[i])
        if et_event[i]:
            if death:
                et_death[i] = event_day
            else:
                et_failure[i] = event_day
        if et_has_lfud[i]:
            reported_lfud[i] = tx + int(et_lfud_offset[i])
        visits = []
        offset = spec.followup_interval_days
        while offset <= max_fu_offset:
            jitter = int(
                rng.integers(-spec.followup_noise_days, spec.followup_noise_days + 1)
            )
            day = offset + jitter
            if day >= event_offset:
                break
            if rng.random() < spec.iqtig.followup_prob:
                visits.append(tx + day)
                fu_rows.append((ids[i], tx + day, None, None))
            offset += spec.followup_interval_days
        iqtig_reported = bool(iqtig_event[i])
        if iqtig_reported:
            fu_rows.append(
                (
                    ids[i],
                    event_day,
                    event_day if death else None,
                    None if death else event_day,
                )
            )
        recipients_ledger.append(
            {
                "id": ids[i],
                "tx_day": tx,
                "event_day": event_day,
                "event_type": "death" if death else "graft_failure",
                "et_reported_event": bool(et_event[i]),
                "iqtig_reported_event": iqtig_reported,
                "et_reported_lfud": reported_lfud[i],
                "n_followup_visits": len(visits),
            }
        )

    id_meta = ColumnMeta(
        name="recipient_id", kind="identifier", provider="ET", structural=True
    )
    recipients = (
        [
            id_meta,
            ColumnMeta(name="et_death_date", kind="relative_date", provider="ET"),
        ],
        {"recipient_id": list(ids), "et_death_date": et_death},
    )
    transplants = (
        [
            id_meta,
            ColumnMeta(name="tx_date", kind="relative_date", provider="ET"),
            ColumnMeta(name="reported_lfud", kind="relative_date", provider="ET"),
            ColumnMeta(
                name="et_graft_failure", kind="relative_date", provider="ET"
            ),
        ],
        {
            "recipient_id": list(ids),
            "tx_date": [int(v) for v in tx_days],
            "reported_lfud": reported_lfud,
            "et_graft_failure": et_failure,
        },
    )
    fu_id_meta = ColumnMeta(
        name="recipient_id", kind="identifier", provider="IQTIG", structural=True
    )
    followups = (
        [
            fu_id_meta,
            ColumnMeta(name="fu_date", kind="relative_date", provider="IQTIG"),
            ColumnMeta(
                name="fu_death_date", kind="relative_date", provider="IQTIG"
            ),
            ColumnMeta(
                name="fu_failure_date", kind="relative_date", provider="IQTIG"
            ),
        ],
        {
            "recipient_id": [r[0] for r in fu_rows],
            "fu_date": [r[1] for r in fu_rows],
            "fu_death_date": [r[2] for r in fu_rows],
            "fu_failure_date": [r[3] for r in fu_rows],
        },
    )
    tables = {
        SURVIVAL_RECIPIENTS: recipients,
        SURVIVAL_TRANSPLANTS: transplants,
        SURVIVAL_FOLLOWUPS: followups,
    }
    return tables, recipients_ledger


def _schema_column(meta: ColumnMeta) -> dict:
    entry: dict = {
        "name": meta.name,
        "kind": meta.kind,
        "provider": meta.provider,
    }
    if meta.sentinels:
        entry["sentinels"] = list(meta.sentinels)
    if meta.structural:
        entry["structural"] = True
    if meta.group is not None:
        entry["group"] = meta.group
    return entry


def generate(config: SynthConfig) -> GeneratedBundle:
    """Produce tables, their schema document, and the truth ledger."""
    rng = np.random.default_rng(config.seed)
    ledger_columns: dict[str, dict] = {}
    ledger_groups: list[dict] = []
    tables: dict[str, RegistryTable] = {}
    schema_tables: list[dict] = []

    for spec in config.tables:
        metas, cells = _generate_generic_table(
            rng, spec, list(config.groups), ledger_columns, ledger_groups
        )
        table = RegistryTable.from_mapping(spec.name, metas, cells)
        tables[spec.name] = table
        schema_tables.append(
            {
                "name": spec.name,
                "file": f"{spec.name}.csv",
                "columns": [_schema_column(m) for m in metas],
            }
        )

    recipients_ledger: list[dict] = []
    eventtime_section = None
    if config.survival is not None:
        survival_tables, recipients_ledger = _generate_survival(
            rng, config, config.survival
        )
        for name, (metas, cells) in survival_tables.items():
            table = RegistryTable.from_mapping(name, metas, cells)
            tables[name] = table
            schema_tables.append(
                {
                    "name": name,
                    "file": f"{name}.csv",
                    "columns": [_schema_column(m) for m in metas],
                }
            )
        eventtime_section = {
            "recipient_id": "recipient_id",
            "transplantation": {
                "table": SURVIVAL_TRANSPLANTS,
                "tx_date": "tx_date",
                "reported_lfud": "reported_lfud",
                "graft_failure_date": "et_graft_failure",
            },
            "recipient": {
                "table": SURVIVAL_RECIPIENTS,
                "death_date": "et_death_date",
            },
            "followup": {
                "table": SURVIVAL_FOLLOWUPS,
                "date_columns": ["fu_date"],
                "death_date_columns": ["fu_death_date"],
                "failure_date_columns": ["fu_failure_date"],
            },
        }

    schema_document: dict = {
        "providers": list(config.providers),
        "tables": schema_tables,
    }
    if eventtime_section is not None:
        schema_document["eventtime"] = eventtime_section

    ledger = {
        "seed": config.seed,
        "n_recipients": config.n_recipients,
        "columns": dict(sorted(ledger_columns.items())),
        "groups": ledger_groups,
        "recipients": recipients_ledger,
    }
    return GeneratedBundle(
        tables=tables, schema_document=schema_document, ledger=ledger
    )


def write_bundle(bundle: GeneratedBundle, out_dir: str) -> list[str]:
    """Write schema.yaml, ground_truth.json, and all CSVs; list names."""
    os.makedirs(out_dir, exist_ok=True)
    outputs = []
    for name, table in bundle.tables.items():
        write_table(table, os.path.join(out_dir, f"{name}.csv"))
        outputs.append(f"{name}.csv")
    atomic_write_text(
        os.path.join(out_dir, "schema.yaml"),
        yaml.safe_dump(bundle.schema_document, sort_keys=False),
    )
    outputs.append("schema.yaml")
    atomic_write_text(
        os.path.join(out_dir, "ground_truth.json"),
        json.dumps(bundle.ledger, indent=2, sort_keys=True) + "\n",
    )
    outputs.append("ground_truth.json")
    return outputs
