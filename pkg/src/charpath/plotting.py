"""Static matplotlib figures for the ``report`` command (Agg backend, PNG)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .stats import IncrementReport, TailCurve  # noqa: E402

# fixed metadata keeps repeated renders byte-identical
_PNG_META = {"Software": None}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_paths(paths: Sequence[tuple[str, np.ndarray]], path: str | Path) -> Path:
    """Paths in the complex plane, one panel each."""
    fig, axes = plt.subplots(1, len(paths), figsize=(5 * len(paths), 5), squeeze=False)
    for ax, (label, vals) in zip(axes[0], paths):
        ax.plot(vals.real, vals.imag, lw=0.4, color="k")
        ax.set_title(label)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
    fig.tight_layout()
    return _save(fig, path)


def plot_tails(curves: Sequence[TailCurve], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for c in curves:
        if c.stderr is not None:
            ax.errorbar(c.taus, c.probs, yerr=c.stderr, marker=".", capsize=2, label=c.kind)
        else:
            ax.plot(c.taus, c.probs, marker="o", label=c.kind)
    ax.set_xlabel("tau")
    ax.set_ylabel("tail probability")
    ax.legend(fontsize="small")
    fig.tight_layout()
    return _save(fig, path)


def plot_increments(report: IncrementReport, path: str | Path) -> Path:
    h = np.array([t - s for s, t in report.pairs])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(h, report.fourth_moments, "o-", label=f"q={report.q}, slope {report.slope:.3f}")
    ax.loglog(h, report.fourth_moments[0] * (h / h[0]) ** 2, "--", color="grey", label="slope 2")
    ax.set_xlabel("|t - s|")
    ax.set_ylabel(f"mean |increment|^{report.order}")
    ax.legend(fontsize="small")
    fig.tight_layout()
    return _save(fig, path)
