"""Text serialisation: CSV tables, SVG polylines and JSON manifests.

Floats are written with ``%.17g`` so a value survives a round trip.
"""

from __future__ import annotations

import io
import json
from typing import Iterable, Sequence

import numpy as np

from .stats import IncrementReport, TailCurve


def fmt(x: float) -> str:
    x = float(x)
    if x == 0.0:
        return "0"  # also folds -0.0
    return "%.17g" % x


def _csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def path_csv(t: np.ndarray, values: np.ndarray) -> str:
    """``t,re,im`` rows."""
    values = np.asarray(values, dtype=complex)
    return _csv(("t", "re", "im"), zip(t, values.real, values.imag))


def ensemble_csv(t: np.ndarray, samples: Sequence[np.ndarray]) -> str:
    """Long format ``sample,t,re,im`` for several paths on one grid."""
    rows = (
        (i, tt, v.real, v.imag)
        for i, vals in enumerate(samples)
        for tt, v in zip(t, np.asarray(vals, dtype=complex))
    )
    return _csv(("sample", "t", "re", "im"), rows)


def path_svg(values: np.ndarray, margin: float = 0.05, stroke: float = 0.005) -> str:
    """A single ``<polyline>`` through (Re, -Im), so the imaginary axis points up."""
    values = np.asarray(values, dtype=complex)
    x, y = values.real, -values.imag
    xmin, xmax, ymin, ymax = x.min(), x.max(), y.min(), y.max()
    span = max(xmax - xmin, ymax - ymin) or 1.0
    pad = margin * span
    box = (xmin - pad, ymin - pad, xmax - xmin + 2 * pad, ymax - ymin + 2 * pad)
    pts = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in zip(x, y))
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{" ".join(fmt(v) for v in box)}">\n'
        f'<polyline fill="none" stroke="black" stroke-width="{fmt(stroke * span)}" '
        f'stroke-linejoin="round" points="{pts}"/>\n'
        "</svg>\n"
    )


def tail_csv(curve: TailCurve) -> str:
    return _csv(("tau", "prob", "stderr"), curve.rows())


def increment_csv(report: IncrementReport) -> str:
    return _csv(("s", "t", "moment4"), ((s, t, m) for (s, t), m in zip(report.pairs, report.fourth_moments)))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def to_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def increment_summary(report: IncrementReport) -> dict:
    return {
        "q": report.q,
        "order": report.order,
        "slope": report.slope,
        "pairs": [list(p) for p in report.pairs],
        "moments": report.fourth_moments,
    }
