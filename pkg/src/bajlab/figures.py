"""Figure rendering for report bundles.

Every CLI subcommand that writes delimited output can also render the
matching matplotlib figures next to it.  Uses the Agg backend so report
generation works headless; figures are PNG files named after their CSV
companions.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

plt.rcParams.update({
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
})


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def deviation_heatmap(path: Path, nodes, diff_grid, label_a: str, label_b: str) -> Path:
    """|meanA - meanB| over the evaluation grid."""
    fig, ax = plt.subplots()
    mesh = ax.pcolormesh(nodes, nodes, np.abs(diff_grid).T, shading="nearest")
    fig.colorbar(mesh, ax=ax, label="|meanA - meanB|")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"deviation: {label_a} vs {label_b}", fontsize=9)
    return _save(fig, path)


def curve(path: Path, xs, values, ylabel: str, title: str) -> Path:
    fig, ax = plt.subplots()
    ax.plot(np.asarray(xs), np.asarray(values), lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=9)
    return _save(fig, path)


def curve_panels(path: Path, xs, named_values: dict[str, np.ndarray], title: str) -> Path:
    """One subplot per named curve, shared x axis."""
    n = len(named_values)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(6.4, 2.4 * nrows),
                             sharex=True, squeeze=False)
    flat = axes.ravel()
    for ax, (name, values) in zip(flat, named_values.items()):
        ax.plot(np.asarray(xs), np.asarray(values), lw=1.2)
        ax.set_ylabel(name)
    for ax in flat[n:]:
        ax.set_visible(False)
    for ax in flat[max(0, n - ncols):n]:
        ax.set_xlabel("u")
    fig.suptitle(title, fontsize=9)
    return _save(fig, path)


def overlay(path: Path, xs, named_values: dict[str, np.ndarray],
            xlabel: str, title: str) -> Path:
    fig, ax = plt.subplots()
    for name, values in named_values.items():
        ax.plot(np.asarray(xs), np.asarray(values), lw=1.2, label=name)
    ax.set_xlabel(xlabel)
    ax.legend()
    ax.set_title(title, fontsize=9)
    return _save(fig, path)
