"""Figure rendering for the report path.

Every plot function takes already-computed report rows and writes one
PNG.  Rendering is headless (Agg) and file writes go through a temp
name plus rename, like the CSV reports.  Statistics that are Undefined
are simply left out of the plots; the CSVs remain the authoritative
record.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .consistency import HIGH_AGREEMENT, PairResult
from .eventtime import HORIZON_DAYS, KMPoint
from .missingness import FluxRow, MissRow

_DPI = 120


def _save(fig, path: str) -> None:
    tmp = f"{path}.tmp.png"
    fig.savefig(tmp, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    os.replace(tmp, path)


def plot_missingness(rows: list[MissRow], path: str) -> None:
    """Boxplot of per-column missingness proportions, one box per provider."""
    by_provider: dict[str, list[float]] = {}
    for row in rows:
        by_provider.setdefault(row.provider, []).append(row.pm)
    providers = sorted(by_provider)
    fig, ax = plt.subplots(figsize=(6, 4))
    if providers:
        ax.boxplot(
            [by_provider[p] for p in providers], tick_labels=providers
        )
    ax.set_ylabel("proportion missing")
    ax.set_xlabel("data provider")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Column missingness by provider")
    _save(fig, path)


def plot_flux(rows: list[FluxRow], path: str) -> None:
    """Influx vs outflux scatter; columns with Undefined flux are skipped."""
    by_provider: dict[str, tuple[list[float], list[float]]] = {}
    for row in rows:
        if row.influx is None or row.outflux is None:
            continue
        xs, ys = by_provider.setdefault(row.provider, ([], []))
        xs.append(row.influx)
        ys.append(row.outflux)
    fig, ax = plt.subplots(figsize=(5, 5))
    for provider in sorted(by_provider):
        xs, ys = by_provider[provider]
        ax.scatter(xs, ys, s=18, alpha=0.7, label=provider)
    ax.set_xlabel("influx")
    ax.set_ylabel("outflux")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Column flux")
    if by_provider:
        ax.legend()
    _save(fig, path)


def plot_consistency(results: list[PairResult], path: str) -> None:
    """Histogram of computed cross-provider associations."""
    values = [r.association for r in results if r.association is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if values:
        ax.hist(values, bins=20, range=(0.0, 1.0), edgecolor="black")
    ax.axvline(
        HIGH_AGREEMENT,
        color="tab:red",
        linestyle="--",
        label=f"high agreement ({HIGH_AGREEMENT})",
    )
    ax.set_xlabel("association")
    ax.set_ylabel("column pairs")
    ax.set_title("Cross-provider association")
    ax.legend()
    _save(fig, path)


def plot_km(
    curves: dict[str, list[KMPoint]],
    path: str,
    horizon_days: int = HORIZON_DAYS,
) -> None:
    """Step plot of the survival curves, one line per outcome definition."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for definition in sorted(curves):
        points = curves[definition]
        times = [p.time for p in points] + [horizon_days]
        survival = [p.survival for p in points] + [points[-1].survival]
        ax.step(times, survival, where="post", label=definition)
    ax.set_xlabel("days since transplantation")
    ax.set_ylabel("survival probability")
    ax.set_xlim(0, horizon_days)
    ax.set_ylim(0.0, 1.02)
    ax.set_title("Kaplan-Meier survival by outcome definition")
    if curves:
        ax.legend()
    _save(fig, path)
