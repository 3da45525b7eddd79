"""Deterministic artifact writers: CSV tables, JSON reports, figures.

Every number that lands in a CSV or JSON artifact goes through one
formatter with 17 significant digits and a '.' decimal separator, so a
repeated run with the same configuration and seed produces byte-identical
delimited files. Figures are rendered headlessly; they are a convenience
view of the same tables and carry no data of their own.
"""

from __future__ import annotations

import json
import os
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "format_sig",
    "write_csv",
    "write_json",
    "build_manifest",
    "save_line_figure",
    "save_heatmap_figure",
]


def format_sig(value) -> str:
    """One number as text: 17 significant digits, integers kept integral."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    return "%.17g" % v


def write_csv(path: str, header: Sequence[str], rows) -> None:
    """Write rows of numbers (or strings) under a header line.

    Numbers are formatted with format_sig; strings pass through. The
    newline is fixed to \\n so the bytes do not depend on the platform.
    """
    if not header:
        raise ConfigurationError("CSV needs a nonempty header")
    width = len(header)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = list(row)
            if len(cells) != width:
                raise ConfigurationError(
                    "CSV row width %d does not match header width %d"
                    % (len(cells), width)
                )
            fh.write(
                ",".join(c if isinstance(c, str) else format_sig(c) for c in cells)
                + "\n"
            )


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        # Decimal strings keep 17-digit fidelity and survive any JSON
        # reader without float re-rounding on the way through.
        return format_sig(obj)
    return obj


def write_json(path: str, payload: Mapping) -> None:
    """Write a JSON report with sorted keys and decimal-string numbers."""
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_manifest(
    command: str,
    resolved_config: Mapping,
    outputs: Sequence[str],
    threads: int,
) -> dict:
    """Everything that influenced a run, in one dictionary.

    resolved_config must already contain every applied default, not just
    the values the caller typed. No clocks and no hostnames: the manifest
    is part of the deterministic output set.
    """
    from . import __version__

    return {
        "command": command,
        "config": dict(resolved_config),
        "outputs": sorted(str(o) for o in outputs),
        "package": {"name": "varadhan-lab", "version": __version__},
        "numpy_version": np.__version__,
        "threads": int(threads),
    }


def _agg_pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_line_figure(
    path: str,
    x,
    curves: Sequence,
    labels: Sequence[str],
    xlabel: str,
    ylabel: str,
    title: str,
    logx: bool = False,
    logy: bool = False,
) -> None:
    """Render one or more curves over a shared abscissa to a PNG file."""
    plt = _agg_pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    for ys, label in zip(curves, labels):
        ax.plot(np.asarray(x, dtype=float), np.asarray(ys, dtype=float),
                marker="o", markersize=3, linewidth=1.2, label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(labels) > 1 or (labels and labels[0]):
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_heatmap_figure(
    path: str,
    xs,
    ys,
    values,
    xlabel: str,
    ylabel: str,
    title: str,
    mask=None,
) -> None:
    """Render a node-value matrix (ny, nx) to a PNG heat map."""
    plt = _agg_pyplot()
    vals = np.array(values, dtype=float)
    if mask is not None:
        vals = np.where(np.asarray(mask, dtype=bool), vals, np.nan)
    fig, ax = plt.subplots(figsize=(6.0, 5.0), dpi=120)
    im = ax.pcolormesh(np.asarray(xs), np.asarray(ys), vals, shading="auto")
    fig.colorbar(im, ax=ax)
    ax.set_aspect("equal")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
