"""Artifact writers: CSV exports, plot-data series, JSON reports, figures,
and the run manifest with content digests.

Every writer is deterministic for fixed inputs (stable row order, no
timestamps, PNG metadata stripped), so a manifest of sha256 digests is
reproducible byte-for-byte across runs and machines.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from typing import Iterable, Sequence

AGG_PROFILE_FIELDS = ("n", "k", "s", "mode", "domain")
CR_EXPORT_FIELDS = ("graph_id", "vertex", "t", "token_hash", "token")
TRACE_EXPORT_FIELDS = ("graph_id", "vertex", "layer", "agg_output", "bitlen")
PLOT_DATA_FIELDS = ("series", "x", "y")


def write_csv(path: str, fieldnames: Sequence[str], rows: Iterable[dict]) -> str:
    """Write rows restricted to fieldnames; newline-normalized; returns path."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def write_json_report(path: str, report: dict) -> str:
    """Stable-key JSON document; the structured-text report format."""
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def plot_data_rows(series: dict[str, Sequence[tuple]]) -> list[dict]:
    """Flatten named (x, y) series into grouped two-column rows."""
    rows = []
    for name in series:
        for x, y in series[name]:
            rows.append({"series": name, "x": x, "y": y})
    return rows


def write_plot_data(path: str, series: dict[str, Sequence[tuple]]) -> str:
    """Plot-data file: header always present, one row per point per series."""
    return write_csv(path, PLOT_DATA_FIELDS, plot_data_rows(series))


def render_series_figure(
    path: str,
    series: dict[str, Sequence[tuple]],
    title: str,
    xlabel: str,
    ylabel: str,
    logy: bool = False,
) -> str:
    """Render named series as a PNG with deterministic bytes.

    Agg backend, fixed size/dpi, metadata stripped; same inputs give the
    same file, so figures can be manifested like any other artifact.
    """
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=100)
    markers = ["o", "s", "^", "d", "v", "*", "x", "+"]
    for i, name in enumerate(series):
        pts = list(series[name])
        if not pts:
            continue
        xs = [float(p[0]) for p in pts]
        ys = [float(p[1]) for p in pts]
        ax.plot(xs, ys, marker=markers[i % len(markers)], label=name)
    if logy:
        ax.set_yscale("log", base=2)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if series:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None, "CreationDate": None})
    plt.close(fig)
    return path


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: str, artifact_paths: Sequence[str], extra: dict | None = None) -> str:
    """Manifest: every artifact with its sha256, sorted by relative path."""
    entries = []
    for path in sorted(artifact_paths, key=lambda p: os.path.relpath(p, out_dir)):
        entries.append(
            {
                "path": os.path.relpath(path, out_dir),
                "sha256": sha256_file(path),
                "bytes": os.path.getsize(path),
            }
        )
    doc = {"artifacts": entries}
    if extra:
        doc.update(extra)
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path
