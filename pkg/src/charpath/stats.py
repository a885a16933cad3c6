"""Distributional comparisons between character paths and the random series.

The maximum statistic for characters uses Phi_q(tau) = P(max_t |S_chi(t)| >
(e^gamma / pi) tau).  Its limit is quoted as P(max_t |F(t)| > 2 e^gamma tau)
for the series normalised as sum X_n (1 - e(nt)) / n, which is 2 pi times the
(eta/(2 pi))-normalised F used in :mod:`charpath.randomseries`.  Both tails
therefore compare the same threshold, (e^gamma / pi) tau, on the scale of
f_chi and F_+-.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dirichlet import PrimeContext, family_indices
from .moments import M_limit, MomentSpec, _product
from .paths import PathGrid, family_max_abs, family_path_values
from .randomseries import SeriesSpec, Truncation, ensemble_sup, sample_ensemble

EULER_GAMMA = 0.57721566490153286
CHAR_SCALE = math.exp(EULER_GAMMA) / math.pi  # e^gamma / pi
LIMIT_SCALE = 2 * math.exp(EULER_GAMMA)  # 2 e^gamma
# ratio between the sum X_n(1 - e(nt))/n normalisation and ours
SERIES_RESCALE = 2 * math.pi

PARITY_TO_SERIES = {"odd": "minus", "even": "plus"}


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TailCurve:
    taus: np.ndarray
    probs: np.ndarray
    kind: str
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[float, float, float]]:
        err = self.stderr if self.stderr is not None else np.zeros_like(self.probs)
        return [(float(t), float(p), float(e)) for t, p, e in zip(self.taus, self.probs, err)]


@dataclass(frozen=True)
class IncrementReport:
    q: int
    pairs: list[tuple[float, float]]
    fourth_moments: np.ndarray
    slope: float
    order: int = 4


def tau_grid(spec: str) -> np.ndarray:
    """Parse ``start:end:count`` (inclusive, linear)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError("tau grid must look like start:end:count")
    start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("tau grid needs a positive count")
    if count == 1:
        return np.array([start])
    return np.linspace(start, end, count)


def _tail(maxima: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    # fraction strictly above each threshold
    srt = np.sort(maxima)
    above = len(srt) - np.searchsorted(srt, thresholds, side="right")
    return above / len(srt)


def phi_q(
    ctx: PrimeContext, taus: Sequence[float], parity: str | None = None, threads: int = 1
) -> TailCurve:
    """Exact Phi_q over nonprincipal characters (optionally of one parity)."""
    taus = np.asarray(taus, dtype=float)
    js = family_indices(ctx, parity)
    maxima = family_max_abs(ctx, js, threads)
    probs = _tail(maxima, CHAR_SCALE * taus)
    meta = {"q": ctx.q, "parity": parity or "all", "characters": int(len(js)), "principal": "excluded"}
    return TailCurve(taus, probs, f"character(q={ctx.q}, parity={parity or 'all'})", None, meta)


def phi_limit(
    taus: Sequence[float],
    samples: int,
    N: int = 10_000,
    grid: PathGrid | int = 4096,
    parity: str = "minus",
    seed: int = 0,
    threads: int = 1,
) -> TailCurve:
    """Monte Carlo P(max_t |2 pi F(t)| > 2 e^gamma tau) with binomial standard errors."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    taus = np.asarray(taus, dtype=float)
    if isinstance(grid, int):
        grid = PathGrid.uniform(grid)
    parity = PARITY_TO_SERIES.get(parity, parity)
    spec = SeriesSpec(parity, Truncation.symmetric(N), grid)
    sup = SERIES_RESCALE * ensemble_sup(spec, samples, seed, threads)
    probs = _tail(sup, LIMIT_SCALE * taus)
    stderr = np.sqrt(probs * (1 - probs) / samples)
    meta = {"samples": samples, "terms": N, "grid": len(grid), "parity": parity, "seed": seed}
    return TailCurve(taus, probs, f"montecarlo(samples={samples}, truncation={N})", stderr, meta)


def tail_envelope(tau: float) -> float:
    """exp(-e^{tau - c - 2} / tau), c = e^{-gamma} log 2 (leading order only)."""
    c = math.exp(-EULER_GAMMA) * math.log(2)
    return math.exp(-math.exp(tau - c - 2) / tau)


def ecdf_distance(a: TailCurve, b: TailCurve) -> float:
    if a.taus.shape != b.taus.shape or not np.array_equal(a.taus, b.taus):
        raise GridMismatch("tail curves are on different tau grids")
    return float(np.max(np.abs(a.probs - b.probs)))


def increment_moment(
    ctx: PrimeContext, s: float, t: float, order: int = 4, parity: str | None = None
) -> float:
    """Average over nonprincipal chi of |f_chi(t) - f_chi(s)|^order."""
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    s, t = sorted((s, t))
    if s == t:
        return 0.0
    js = family_indices(ctx, parity)
    vals = family_path_values(ctx, js, PathGrid.of([s, t]))
    diff = np.abs(vals[:, 1] - vals[:, 0])
    return float(np.mean(diff**order))


def trivial_increment_bound(q: int, s: float, t: float, order: int = 4) -> float:
    return q ** (order / 2) * abs(t - s) ** order


def increment_report(
    ctx: PrimeContext,
    widths: Sequence[float] = tuple(2.0**-i for i in range(1, 7)),
    center: float = 0.5,
    order: int = 4,
) -> IncrementReport:
    """Moments at pairs (center - h/2, center + h/2) and their log-log slope in h."""
    pairs = [(center - h / 2, center + h / 2) for h in widths]
    moments = np.array([increment_moment(ctx, s, t, order) for s, t in pairs])
    slope = float(np.polyfit(np.log(widths), np.log(moments), 1)[0])
    return IncrementReport(ctx.q, pairs, moments, slope, order)


def multi_indices(k: int, D: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (n, m) in Z_{>=0}^k x Z_{>=0}^k with 1 <= |n| = |m| <= D."""
    out = []
    for total in range(1, D + 1):
        vecs = [v for v in itertools.product(range(total + 1), repeat=k) if sum(v) == total]
        out.extend((n, m) for n in vecs for m in vecs)
    return out


@dataclass(frozen=True)
class MomentRow:
    n: tuple[int, ...]
    m: tuple[int, ...]
    character: complex
    limit: complex
    montecarlo: complex | None

    @property
    def discrepancy(self) -> float:
        return abs(self.character - self.limit)


def finite_dim_compare(
    ctx: PrimeContext,
    ts: Sequence[float],
    D: int = 2,
    parity: str = "odd",
    samples: int = 0,
    terms: int = 10_000,
    seed: int = 0,
    cutoff: int = 20_000,
) -> list[MomentRow]:
    """Character moments against the limiting moments (and optionally Monte Carlo)."""
    if D > 3:
        raise ValueError("maximum degree D is limited to 3")
    ts = tuple(ts)
    grid = PathGrid.of(list(ts))
    js = family_indices(ctx, parity)
    fvals = family_path_values(ctx, js, grid)
    mc = None
    if samples:
        spec = SeriesSpec(PARITY_TO_SERIES[parity], Truncation.symmetric(terms), grid)
        mc = np.array([s.values for s in sample_ensemble(spec, samples, seed)])
    rows = []
    for n, m in multi_indices(len(ts), D):
        spec = MomentSpec(ts, n, m, parity)
        char = complex(2.0 / ctx.phi * np.sum(_product(fvals, spec)))
        lim = M_limit(spec, cutoff).value
        mce = complex(np.mean(_product(mc, spec))) if mc is not None else None
        rows.append(MomentRow(n, m, char, lim, mce))
    return rows
