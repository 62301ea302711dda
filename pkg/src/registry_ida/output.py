"""Report serialization: CSV rendering, atomic writes, run manifest.

Reports never contain NaN text or empty numeric cells: a statistic
without a value is rendered as the literal token ``Undefined``.  Floats
are rendered with six significant digits so reruns diff cleanly; full
precision stays internal.  Files are written to a temporary name in
the target directory and moved into place, so readers never observe a
half-written report.
"""

from __future__ import annotations

import csv
import io
import json
import os
import platform
from datetime import datetime, timezone
from typing import Iterable, Sequence

UNDEFINED = "Undefined"


def fmt_value(value: object) -> str:
    """Render one report cell; None becomes the Undefined token."""
    if value is None:
        return UNDEFINED
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return "%.6g" % value
    return str(value)


def atomic_write_text(path: str, text: str) -> None:
    """Write text via a sibling temp file and an atomic rename."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([fmt_value(v) for v in row])
    return buffer.getvalue()


def write_report_csv(
    path: str, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> None:
    atomic_write_text(path, render_csv(header, rows))


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_manifest(
    out_dir: str,
    command: str,
    config_path: str | None,
    seed: int | None,
    outputs: Sequence[str],
    started_at: str,
) -> str:
    """Write manifest.json describing the run; returns its path.

    The two timestamps are the only fields that vary between reruns
    with identical inputs, so byte-identity checks skip this file.
    """
    import numpy

    from . import __version__

    manifest = {
        "command": command,
        "config": config_path,
        "seed": seed,
        "outputs": sorted(outputs),
        "versions": {
            "package": __version__,
            "python": platform.python_version(),
            "numpy": numpy.__version__,
        },
        "started_at": started_at,
        "finished_at": utc_now(),
    }
    path = os.path.join(out_dir, "manifest.json")
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
