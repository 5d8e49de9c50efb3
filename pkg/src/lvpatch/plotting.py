"""Static SVG plots from the exported CSV files.

Output is byte-stable for identical inputs: the SVG hash salt is fixed and
the creation date is omitted.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

TRAJECTORY_HEADER = ["t", "x1", "y1", "x2", "y2"]
SCAN_HEADER = ["T", "defect", "accepted"]

_STYLE = {"svg.hashsalt": "lvpatch", "svg.fonttype": "none", "path.simplify": False}


class SchemaError(ValueError):
    pass


def read_csv(path, header: Sequence[str]) -> np.ndarray:
    with open(path) as fh:
        first = fh.readline().strip().split(",")
    if first != list(header):
        raise SchemaError(f"{path}: expected columns {','.join(header)}, found {','.join(first)}")
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def _thin(data: np.ndarray, max_points: int = 4000) -> np.ndarray:
    step = max(1, -(-len(data) // max_points))
    if step == 1:
        return data
    idx = np.unique(np.append(np.arange(0, len(data), step), len(data) - 1))
    return data[idx]


def _save(fig, out):
    out = Path(out)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out


def plot_timeseries(csv_path, out, title: str | None = None) -> Path:
    """Four-line plot of x1, y1, x2, y2 against t."""
    data = _thin(read_csv(csv_path, TRAJECTORY_HEADER))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(8, 4))
        for k, name in enumerate(TRAJECTORY_HEADER[1:], start=1):
            ax.plot(data[:, 0], data[:, k], lw=0.8, label=name)
        ax.set_xlabel("t")
        ax.set_ylabel("density")
        ax.legend(loc="upper right", ncol=4)
        if title:
            ax.set_title(title)
        return _save(fig, out)


def plot_overlay(csv_paths: Sequence, out, title: str | None = None) -> Path:
    """One panel per component, every trajectory overlaid."""
    runs = [_thin(read_csv(p, TRAJECTORY_HEADER)) for p in csv_paths]
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(2, 2, figsize=(10, 6), sharex=True)
        for k, ax in enumerate(axes.flat, start=1):
            for i, data in enumerate(runs):
                ax.plot(data[:, 0], data[:, k], lw=0.8, label=f"run {i}")
            ax.set_ylabel(TRAJECTORY_HEADER[k])
        for ax in axes[1]:
            ax.set_xlabel("t")
        axes[0, 0].legend(loc="upper right")
        if title:
            fig.suptitle(title)
        return _save(fig, out)


def plot_scan(csv_path, out, title: str | None = None) -> Path:
    """Defect against shift, accepted candidates marked."""
    data = read_csv(csv_path, SCAN_HEADER)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(8, 4))
        ax.plot(data[:, 0], data[:, 1], lw=0.8)
        acc = data[:, 2] > 0
        ax.plot(data[acc, 0], data[acc, 1], "o", ms=4, label="accepted")
        ax.set_xlabel("shift T")
        ax.set_ylabel("defect")
        if acc.any():
            ax.legend(loc="upper right")
        if title:
            ax.set_title(title)
        return _save(fig, out)


def emit_plot(csv_inputs, out, kind: str = "auto", title: str | None = None) -> Path:
    """Dispatch on ``kind`` (timeseries, overlay, scan) or infer it from the header."""
    paths = [csv_inputs] if isinstance(csv_inputs, (str, Path)) else list(csv_inputs)
    if not paths:
        raise ValueError("no CSV inputs")
    if kind == "auto":
        with open(paths[0]) as fh:
            head = fh.readline().strip().split(",")
        if head == SCAN_HEADER:
            kind = "scan"
        elif head == TRAJECTORY_HEADER:
            kind = "timeseries" if len(paths) == 1 else "overlay"
        else:
            raise SchemaError(f"{paths[0]}: unrecognised columns {','.join(head)}")
    if kind == "timeseries":
        return plot_timeseries(paths[0], out, title)
    if kind == "overlay":
        return plot_overlay(paths, out, title)
    if kind == "scan":
        return plot_scan(paths[0], out, title)
    raise ValueError(f"unknown plot kind {kind!r}")
