"""Command-line pipeline: load a bundle, emit analysis reports.

Every subcommand loads the bundle described by a schema config, runs
one analysis, and writes CSV reports plus a manifest.json into the
output directory.  ``report`` runs the whole pipeline and additionally
renders overview figures.  ``synth`` generates a synthetic bundle
instead of reading one.

Exit codes: 0 success, 2 configuration error, 3 data error,
4 internal error.  Reports are computed fully before anything is
written, so a failing command leaves no partial CSVs behind.
"""

from __future__ import annotations

import argparse
import os
import sys

from .consistency import PairResult, consistency_report
from .errors import (
    ConfigError,
    DataError,
    EmptyCohort,
    EmptyProviderIndex,
    InvalidConfig,
    NoUsableFeatures,
    UnknownProvider,
)
from .eventtime import DEFINITIONS, CohortRow, cohort_report, km_curves
from .ingest import discover_multisource_groups, load_bundle
from .missingness import flux_report, miss_report
from .model import RegistryTable
from .output import atomic_write_text, render_csv, utc_now, write_manifest
from .schema import SchemaConfig, load_schema
from .synth import generate, load_synth_config, write_bundle
from .tree import (
    TreeParams,
    cv_table,
    evaluate_rmse,
    fit_tree,
    format_tree,
    importance,
    prepare_tree_dataset,
    split_train_test,
)

MISS_HEADER = (
    "table",
    "column",
    "provider",
    "n_provider_rows",
    "n_missing",
    "n_observed",
    "pm",
)
FLUX_HEADER = ("table", "column", "provider", "influx", "outflux")
VALIDATION_HEADER = (
    "table",
    "file",
    "n_rows",
    "n_columns",
    "n_providers",
    "n_groups",
)
TREE_SUMMARY_HEADER = (
    "table",
    "provider",
    "status",
    "n_rows",
    "n_features",
    "n_train",
    "n_test",
    "n_nodes",
    "n_leaves",
    "depth",
    "train_rmse",
    "test_rmse",
)
IMPORTANCE_HEADER = (
    "table",
    "provider",
    "feature",
    "raw_importance",
    "adjusted_importance",
    "important",
)
CV_HEADER = ("table", "provider", "fold", "n_train", "n_test", "rmse")
CONSISTENCY_HEADER = (
    "table",
    "group",
    "target_provider",
    "source_provider",
    "target_column",
    "source_column",
    "usable_cases",
    "usable_reason",
    "measure",
    "association",
    "not_computable",
)
COHORT_HEADER = ("recipient_id", "definition", "T_days", "delta", "disposition")
KM_HEADER = ("time_days", "survival", "n_risk", "n_event")
SUMMARY_HEADER = ("statistic", "value")


class _Run:
    """Collects report texts, then writes them all plus the manifest."""

    def __init__(self, args: argparse.Namespace, command: str):
        self.out_dir: str = args.out_dir
        self.command = command
        self.config_path: str | None = getattr(args, "config", None)
        self.seed: int | None = getattr(args, "seed", None)
        self.started_at = utc_now()
        self.pending: list[tuple[str, str]] = []
        self.extra_outputs: list[str] = []

    def add_csv(self, name: str, header, rows) -> None:
        self.pending.append((name, render_csv(header, rows)))

    def add_text(self, name: str, text: str) -> None:
        self.pending.append((name, text))

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def note_output(self, name: str) -> None:
        self.extra_outputs.append(name)

    def flush(self) -> None:
        os.makedirs(self.out_dir, exist_ok=True)
        for name, text in self.pending:
            atomic_write_text(self.path(name), text)
        outputs = [name for name, _ in self.pending] + self.extra_outputs
        write_manifest(
            self.out_dir,
            self.command,
            self.config_path,
            self.seed,
            outputs,
            self.started_at,
        )


def _load(args) -> tuple[SchemaConfig, dict[str, RegistryTable]]:
    config = load_schema(args.config)
    tables = load_bundle(config)
    wanted = getattr(args, "tables", None)
    if wanted:
        names = [t.strip() for t in wanted.split(",") if t.strip()]
        unknown = [n for n in names if n not in tables]
        if unknown:
            raise InvalidConfig(f"unknown tables requested: {unknown}")
        tables = {n: tables[n] for n in names}
    return config, tables


def _providers(args, config: SchemaConfig) -> tuple[str, ...]:
    one = getattr(args, "provider", None)
    if one is None:
        return config.providers
    if one not in config.providers:
        raise UnknownProvider(
            f"provider {one!r} is not declared; schema lists "
            f"{list(config.providers)}"
        )
    return (one,)


def _validation_rows(config: SchemaConfig, tables: dict[str, RegistryTable]):
    groups = discover_multisource_groups(config)
    files = {spec.name: spec.file for spec in config.tables}
    rows = []
    for name, table in tables.items():
        n_groups = sum(1 for g in groups if g.table == name)
        rows.append(
            (
                name,
                files[name],
                table.n_rows,
                len(table.columns),
                len(table.providers),
                n_groups,
            )
        )
    return rows


def cmd_ingest(args) -> int:
    config, tables = _load(args)
    run = _Run(args, "ingest")
    run.add_csv("validation.csv", VALIDATION_HEADER, _validation_rows(config, tables))
    run.flush()
    return 0


def _miss_rows(tables, providers):
    rows = []
    for table in tables.values():
        for r in miss_report(table):
            if r.provider in providers:
                rows.append(
                    (
                        r.table,
                        r.column,
                        r.provider,
                        r.n_provider_rows,
                        r.n_missing,
                        r.n_observed,
                        r.pm,
                    )
                )
    return rows


def _flux_rows(tables, providers):
    rows = []
    for table in tables.values():
        for r in flux_report(table):
            if r.provider in providers:
                rows.append((r.table, r.column, r.provider, r.influx, r.outflux))
    return rows


def cmd_missingness(args) -> int:
    config, tables = _load(args)
    providers = _providers(args, config)
    run = _Run(args, "missingness")
    run.add_csv("missingness.csv", MISS_HEADER, _miss_rows(tables, providers))
    run.flush()
    return 0


def cmd_flux(args) -> int:
    config, tables = _load(args)
    providers = _providers(args, config)
    run = _Run(args, "flux")
    run.add_csv("flux.csv", FLUX_HEADER, _flux_rows(tables, providers))
    run.flush()
    return 0


def _tree_reports(tables, providers, params, want_cv: bool):
    """Fit one missingness tree per (table, provider); collect reports."""
    summary = []
    importance_rows = []
    cv_rows = []
    texts: list[tuple[str, str]] = []
    for table in tables.values():
        for provider in providers:
            base = [table.name, provider]
            try:
                dataset = prepare_tree_dataset(table, provider)
            except EmptyProviderIndex:
                summary.append(base + ["empty_provider"] + [None] * 9)
                continue
            except NoUsableFeatures:
                summary.append(base + ["no_usable_features"] + [None] * 9)
                continue
            try:
                train, test = split_train_test(dataset, params)
            except EmptyCohort:
                summary.append(
                    base
                    + ["too_few_rows", dataset.n, len(dataset.features)]
                    + [None] * 7
                )
                continue
            tree = fit_tree(train, params)
            nodes = tree.nodes()
            summary.append(
                base
                + [
                    "ok",
                    dataset.n,
                    len(dataset.features),
                    train.n,
                    test.n,
                    len(nodes),
                    tree.n_leaves(),
                    tree.depth(),
                    evaluate_rmse(tree, train),
                    evaluate_rmse(tree, test),
                ]
            )
            for row in importance(tree):
                importance_rows.append(
                    base + [row.feature, row.raw, row.adjusted, row.important]
                )
            texts.append(
                (f"tree_{table.name}_{provider}.txt", format_tree(tree))
            )
            if want_cv:
                for fold, n_train, n_test, rmse in cv_table(dataset, params):
                    cv_rows.append(base + [fold, n_train, n_test, rmse])
    return summary, importance_rows, cv_rows, texts


def cmd_tree(args) -> int:
    config, tables = _load(args)
    providers = _providers(args, config)
    params = TreeParams(seed=args.seed)
    run = _Run(args, "tree")
    summary, importance_rows, cv_rows, texts = _tree_reports(
        tables, providers, params, args.cv
    )
    run.add_csv("tree_summary.csv", TREE_SUMMARY_HEADER, summary)
    run.add_csv("importance.csv", IMPORTANCE_HEADER, importance_rows)
    if args.cv:
        run.add_csv("cv.csv", CV_HEADER, cv_rows)
    for name, text in texts:
        run.add_text(name, text)
    run.flush()
    return 0


def _consistency_rows(results: list[PairResult]):
    return [
        (
            r.table,
            r.group,
            r.target_provider,
            r.source_provider,
            r.target_column,
            r.source_column,
            r.usable_cases,
            r.usable_reason,
            r.measure,
            r.association,
            r.not_computable,
        )
        for r in results
    ]


def cmd_consistency(args) -> int:
    config, tables = _load(args)
    groups = discover_multisource_groups(config)
    groups = [g for g in groups if g.table in tables]
    results, summary = consistency_report(tables, groups)
    run = _Run(args, "consistency")
    run.add_csv("consistency.csv", CONSISTENCY_HEADER, _consistency_rows(results))
    run.add_csv("consistency_summary.csv", SUMMARY_HEADER, summary.items())
    run.flush()
    return 0


def _require_eventtime(config: SchemaConfig):
    if config.eventtime is None:
        raise InvalidConfig(
            "schema has no eventtime section; cohort and survival reports "
            "need one"
        )
    return config.eventtime


def _cohort_rows(rows: list[CohortRow]):
    return [
        (r.recipient_id, r.definition, r.t_days, r.delta, r.disposition)
        for r in rows
    ]


def cmd_eventtime(args) -> int:
    config, tables = _load(args)
    cohort, counts = cohort_report(tables, _require_eventtime(config))
    run = _Run(args, "eventtime")
    run.add_csv("cohort.csv", COHORT_HEADER, _cohort_rows(cohort))
    run.add_csv("eventtime_summary.csv", SUMMARY_HEADER, counts.items())
    run.flush()
    return 0


def _km_rows(points):
    return [(p.time, p.survival, p.n_at_risk, p.n_events) for p in points]


def cmd_km(args) -> int:
    config, tables = _load(args)
    cohort, _ = cohort_report(tables, _require_eventtime(config))
    curves = km_curves(cohort)
    run = _Run(args, "km")
    if args.definition is not None:
        if args.definition not in curves:
            raise EmptyCohort(
                f"definition {args.definition!r}: no included recipients"
            )
        run.add_csv("km.csv", KM_HEADER, _km_rows(curves[args.definition]))
    else:
        # a definition nobody qualifies for still gets its header-only file
        for definition in DEFINITIONS:
            run.add_csv(
                f"km_{definition}.csv",
                KM_HEADER,
                _km_rows(curves.get(definition, [])),
            )
    run.flush()
    return 0


def cmd_synth(args) -> int:
    config = load_synth_config(args.synth_config)
    bundle = generate(config)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = write_bundle(bundle, args.out_dir)
    write_manifest(
        args.out_dir,
        "synth",
        args.synth_config,
        config.seed,
        outputs,
        utc_now(),
    )
    return 0


def cmd_report(args) -> int:
    config, tables = _load(args)
    providers = _providers(args, config)
    params = TreeParams(seed=args.seed)
    run = _Run(args, "report")

    run.add_csv("validation.csv", VALIDATION_HEADER, _validation_rows(config, tables))
    miss_rows = _miss_rows(tables, providers)
    run.add_csv("missingness.csv", MISS_HEADER, miss_rows)
    flux_rows = _flux_rows(tables, providers)
    run.add_csv("flux.csv", FLUX_HEADER, flux_rows)

    summary, importance_rows, cv_rows, texts = _tree_reports(
        tables, providers, params, args.cv
    )
    run.add_csv("tree_summary.csv", TREE_SUMMARY_HEADER, summary)
    run.add_csv("importance.csv", IMPORTANCE_HEADER, importance_rows)
    if args.cv:
        run.add_csv("cv.csv", CV_HEADER, cv_rows)
    for name, text in texts:
        run.add_text(name, text)

    groups = [g for g in discover_multisource_groups(config) if g.table in tables]
    results, consistency_summary = consistency_report(tables, groups)
    run.add_csv("consistency.csv", CONSISTENCY_HEADER, _consistency_rows(results))
    run.add_csv(
        "consistency_summary.csv", SUMMARY_HEADER, consistency_summary.items()
    )

    curves = None
    if config.eventtime is not None:
        cohort, counts = cohort_report(tables, config.eventtime)
        run.add_csv("cohort.csv", COHORT_HEADER, _cohort_rows(cohort))
        run.add_csv("eventtime_summary.csv", SUMMARY_HEADER, counts.items())
        curves = km_curves(cohort)
        for definition in DEFINITIONS:
            run.add_csv(
                f"km_{definition}.csv",
                KM_HEADER,
                _km_rows(curves.get(definition, [])),
            )

    if args.figures:
        # import here so text-only commands never pay for matplotlib
        from . import figures
        from .missingness import FluxRow, MissRow

        os.makedirs(run.out_dir, exist_ok=True)
        figures.plot_missingness(
            [MissRow(*row) for row in miss_rows], run.path("missingness.png")
        )
        run.note_output("missingness.png")
        figures.plot_flux(
            [FluxRow(*row) for row in flux_rows], run.path("flux.png")
        )
        run.note_output("flux.png")
        figures.plot_consistency(results, run.path("consistency.png"))
        run.note_output("consistency.png")
        if curves:
            figures.plot_km(curves, run.path("km.png"))
            run.note_output("km.png")

    run.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="registry-ida",
        description=(
            "Provider-aware initial data analysis for multi-source "
            "registry exports"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tables=True, provider=False, seed=False):
        p.add_argument("--config", required=True, help="schema config file")
        p.add_argument("--out-dir", required=True, help="report directory")
        if tables:
            p.add_argument(
                "--tables", help="comma-separated table subset (default all)"
            )
        if provider:
            p.add_argument("--provider", help="restrict to one data provider")
        if seed:
            p.add_argument(
                "--seed", type=int, default=0, help="RNG seed (default 0)"
            )

    p = sub.add_parser("ingest", help="validate and summarize a bundle")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("missingness", help="per-column missingness report")
    common(p, provider=True)
    p.set_defaults(func=cmd_missingness)

    p = sub.add_parser("flux", help="per-column influx/outflux report")
    common(p, provider=True)
    p.set_defaults(func=cmd_flux)

    p = sub.add_parser(
        "tree", help="missingness regression trees per table and provider"
    )
    common(p, provider=True, seed=True)
    p.add_argument(
        "--cv", action="store_true", help="also write per-fold CV estimates"
    )
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser(
        "consistency", help="cross-provider agreement for multi-source groups"
    )
    common(p)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser(
        "eventtime", help="survival cohort with per-definition outcomes"
    )
    common(p)
    p.set_defaults(func=cmd_eventtime)

    p = sub.add_parser("km", help="Kaplan-Meier survival curves")
    common(p)
    p.add_argument(
        "--definition",
        choices=DEFINITIONS,
        help="single outcome definition (default: all three)",
    )
    p.set_defaults(func=cmd_km)

    p = sub.add_parser("synth", help="generate a synthetic bundle")
    p.add_argument(
        "--synth-config", required=True, help="generator config file"
    )
    p.add_argument("--out-dir", required=True, help="bundle directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser(
        "report", help="full pipeline: all reports plus overview figures"
    )
    common(p, provider=True, seed=True)
    p.add_argument(
        "--cv", action="store_true", help="also write per-fold CV estimates"
    )
    p.add_argument(
        "--figures",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="render PNG figures (default on)",
    )
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - catch-all safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
