"""The random Fourier series F, F_+ and F_- built from Steinhaus coefficients.

Conventions (X_k Steinhaus, eta uniform on the circle):

    F_+(t) = (eta/pi) sum_{k>=1} (X_k/k) sin(2 pi k t)
    F_-(t) = (eta/pi) sum_{k>=1} (X_k/k) (1 - cos(2 pi k t))
    F(t)   = (eta/(2 pi)) sum_{0<|k|} (X_k/k) (1 - e(kt)),   X_{-k} = X_{-1} X_k

Pairing k with -k gives F = F_- when X_{-1} = -1 and F = -i F_+ when
X_{-1} = +1.  Uniform grids are evaluated with one FFT per sample after
folding coefficients modulo the grid period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .dirichlet import TWO_PI
from .paths import PathGrid
from .steinhaus import (
    MIXER_ID,
    SeedSpec,
    SteinhausSampler,
    _cached_spf,
    batch_eta,
    batch_phases,
    batch_signs,
    phase_to_unit,
)
from ._parallel import ordered_map

SeriesParity = Literal["plus", "minus", "general"]

DEFAULT_TERMS = 10007
DEFAULT_GRID = 2048
# streams per block in ensemble evaluation; fixed so output never depends
# on thread count
ENSEMBLE_BLOCK = 64


@dataclass(frozen=True)
class Truncation:
    """``symmetric``: all 1 <= k <= N.  ``smooth``: k <= N with P+(k) <= y."""

    kind: Literal["symmetric", "smooth"]
    N: int
    y: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("truncation N must be at least 1")
        if self.kind == "smooth":
            if self.y is None or self.y < 2:
                raise ValueError("smooth truncation needs y >= 2")
        elif self.kind != "symmetric":
            raise ValueError(f"unknown truncation {self.kind!r}")

    @classmethod
    def symmetric(cls, N: int) -> "Truncation":
        return cls("symmetric", int(N))

    @classmethod
    def smooth(cls, y: int, N: int) -> "Truncation":
        return cls("smooth", int(N), int(y))

    def manifest(self) -> dict:
        out = {"kind": self.kind, "N": self.N}
        if self.y is not None:
            out["y"] = self.y
        return out


@dataclass(frozen=True)
class SeriesSpec:
    parity: SeriesParity = "minus"
    truncation: Truncation = field(default_factory=lambda: Truncation.symmetric(DEFAULT_TERMS))
    grid: PathGrid = field(default_factory=lambda: PathGrid.uniform(DEFAULT_GRID))
    eta: complex | None = None  # None: sampled per stream

    def __post_init__(self):
        if self.parity not in ("plus", "minus", "general"):
            raise ValueError(f"unknown parity {self.parity!r}")
        if self.eta is not None and abs(abs(self.eta) - 1) > 1e-12:
            raise ValueError("fixed eta must have modulus 1")


@dataclass(frozen=True)
class SeriesSample:
    spec: SeriesSpec
    seed_spec: SeedSpec
    eta: complex
    values: np.ndarray


@lru_cache(maxsize=8)
def largest_prime_factor(N: int) -> np.ndarray:
    """P+(n) for 0 <= n <= N, with P+(1) = 1."""
    spf = _cached_spf(max(int(N), 2))[: N + 1]
    lpf = np.ones(N + 1, dtype=np.int64)
    cur = np.arange(N + 1)
    live = cur > 1
    while live.any():
        idx = np.nonzero(live)[0]
        p = spf[cur[idx]]
        lpf[idx] = np.maximum(lpf[idx], p)
        cur[idx] //= p
        live = cur > 1
    lpf.setflags(write=False)
    return lpf


def index_mask(trunc: Truncation) -> np.ndarray:
    """Boolean mask over k = 0..N of the indices kept by a truncation."""
    mask = np.ones(trunc.N + 1, dtype=bool)
    mask[0] = False
    if trunc.kind == "smooth":
        mask &= largest_prime_factor(trunc.N) <= trunc.y
    return mask


def _sincos2pi(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """sin and cos of 2 pi x with quadrant reduction, exact at quarter turns."""
    x = np.asarray(x, dtype=float)
    quarter = np.rint(4 * x)
    rem = TWO_PI * (x - quarter / 4)
    s, c = np.sin(rem), np.cos(rem)
    quad = np.mod(quarter, 4).astype(np.int64)
    sin = np.choose(quad, [s, c, -s, -c])
    cos = np.choose(quad, [c, -s, -c, s])
    return sin, cos


def _basis(parity: str, sign: int, k: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Weights w(k, t) with F = (eta/pi) sum (X_k/k) w(k, t)."""
    sin, cos = _sincos2pi(np.multiply.outer(k, t))
    if parity == "plus":
        return sin
    if parity == "minus":
        return 1 - cos
    # general form, halved prefactor folded into w
    e = cos + 1j * sin
    return 0.5 * ((1 - e) - sign * (1 - np.conj(e)))


def _eval_point(X: np.ndarray, eta: complex, t: float, mask: np.ndarray, parity: str, sign: int) -> complex:
    k = np.nonzero(mask)[0]
    w = _basis(parity, sign, k.astype(float), np.asarray(float(t)))
    return complex(eta / math.pi * np.sum(X[k] / k * w))


def _sampler_values(sampler: SteinhausSampler, N: int) -> np.ndarray:
    return sampler.values(N)


def eval_F_plus(sampler: SteinhausSampler, eta: complex, t: float, N: int) -> complex:
    mask = index_mask(Truncation.symmetric(N))
    return _eval_point(_sampler_values(sampler, N), eta, t, mask, "plus", 1)


def eval_F_minus(sampler: SteinhausSampler, eta: complex, t: float, N: int) -> complex:
    mask = index_mask(Truncation.symmetric(N))
    return _eval_point(_sampler_values(sampler, N), eta, t, mask, "minus", -1)


def eval_F_general(sampler: SteinhausSampler, eta: complex, t: float, N: int) -> complex:
    """Symmetric sum over 0 < |k| <= N using the sampler's X_{-1}."""
    X = _sampler_values(sampler, N)
    k = np.arange(1, N + 1)
    sign = sampler.sign
    sin, cos = _sincos2pi(k * float(t))
    e = cos + 1j * sin
    pos = X[k] / k * (1 - e)
    neg = sign * X[k] / (-k) * (1 - np.conj(e))
    return complex(eta / TWO_PI * (pos.sum() + neg.sum()))


def smooth_truncation_eval(
    sampler: SteinhausSampler, eta: complex, t: float, y: int, N: int, parity: SeriesParity = "minus"
) -> complex:
    """Series restricted to y-smooth indices |n| <= N (n = +-1 always kept)."""
    if y < 2:
        raise ValueError("smoothness bound y must be at least 2")
    if N < y:
        raise ValueError("hard cap N must be at least y")
    mask = index_mask(Truncation.smooth(y, N))
    return _eval_point(_sampler_values(sampler, N), eta, t, mask, parity, sampler.sign)


def _uniform_period(grid: PathGrid) -> int | None:
    if grid.kind == "uniform" and len(grid) >= 2:
        return len(grid) - 1
    return None


def grid_values(
    X: np.ndarray,
    eta: np.ndarray,
    grid: PathGrid,
    mask: np.ndarray,
    parity: str,
    signs: np.ndarray,
) -> np.ndarray:
    """Series values for a block of samples.

    ``X`` has shape (S, N+1) (Steinhaus values, column k = X_k); ``eta`` and
    ``signs`` have shape (S,).  Returns shape (S, len(grid)).
    """
    X = np.atleast_2d(X)
    S, width = X.shape
    N = width - 1
    k = np.arange(N + 1)
    coef = np.zeros_like(X)
    coef[:, mask] = X[:, mask] / k[mask]
    signs = np.broadcast_to(np.asarray(signs), (S,))
    L = _uniform_period(grid)
    if L is None:
        kk = np.nonzero(mask)[0]
        out = np.empty((S, len(grid)), dtype=complex)
        for i in range(S):
            w = _basis(parity, int(signs[i]), kk.astype(float), np.asarray(grid.points))
            out[i] = coef[i, kk] @ w
    else:
        folded = np.zeros((S, L), dtype=complex)
        r = k % L
        for s in range(S):
            folded[s] = np.bincount(r, weights=coef[s].real, minlength=L) + 1j * np.bincount(
                r, weights=coef[s].imag, minlength=L
            )
        total = folded.sum(axis=1)[:, None]
        plus_exp = L * np.fft.ifft(folded, axis=1)  # sum c_k e(k i / L)
        minus_exp = np.fft.fft(folded, axis=1)  # sum c_k e(-k i / L)
        if parity == "plus":
            body = (plus_exp - minus_exp) / 2j
            if L % 2 == 0:
                body[:, L // 2] = 0  # sin(pi k) = 0 for every k
        elif parity == "minus":
            body = total - (plus_exp + minus_exp) / 2
        else:
            body = 0.5 * ((total - plus_exp) - signs[:, None] * (total - minus_exp))
        # t = 1 is t = 0 modulo the period; every form vanishes at both ends
        out = np.concatenate([body, np.zeros((S, 1), dtype=complex)], axis=1)
        out[:, 0] = 0
    return np.asarray(eta)[:, None] / math.pi * out


def _signs_for(spec: SeriesSpec, seed: int, streams: np.ndarray) -> np.ndarray:
    if spec.parity == "plus":
        return np.ones(len(streams), dtype=np.int64)
    if spec.parity == "minus":
        return -np.ones(len(streams), dtype=np.int64)
    return batch_signs(seed, streams)


def _eta_for(spec: SeriesSpec, seed: int, streams: np.ndarray) -> np.ndarray:
    if spec.eta is not None:
        return np.full(len(streams), complex(spec.eta))
    return batch_eta(seed, streams)


def _block(spec: SeriesSpec, seed: int, streams: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    N = spec.truncation.N
    X = phase_to_unit(batch_phases(seed, streams, N))
    X[:, 0] = 0
    eta = _eta_for(spec, seed, streams)
    signs = _signs_for(spec, seed, streams)
    vals = grid_values(X, eta, spec.grid, index_mask(spec.truncation), spec.parity, signs)
    return eta, vals


def _stream_blocks(count: int, first_stream: int = 0) -> list[np.ndarray]:
    streams = np.arange(first_stream, first_stream + count, dtype=np.uint64)
    return [streams[i : i + ENSEMBLE_BLOCK] for i in range(0, count, ENSEMBLE_BLOCK)]


def sample_ensemble(
    spec: SeriesSpec, count: int, base_seed: int, threads: int = 1
) -> list[SeriesSample]:
    """``count`` samples; sample i uses stream id i under ``base_seed``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    blocks = ordered_map(lambda s: (s, _block(spec, base_seed, s)), _stream_blocks(count), threads)
    out = []
    for streams, (eta, vals) in blocks:
        for i, stream in enumerate(streams):
            v = vals[i]
            v.setflags(write=False)
            out.append(SeriesSample(spec, SeedSpec(base_seed, int(stream)), complex(eta[i]), v))
    return out


def ensemble_sup(spec: SeriesSpec, count: int, base_seed: int, threads: int = 1) -> np.ndarray:
    """Grid maximum of |F| for each of ``count`` samples (no values retained)."""
    parts = ordered_map(
        lambda s: np.abs(_block(spec, base_seed, s)[1]).max(axis=1), _stream_blocks(count), threads
    )
    return np.concatenate(parts)


def ensemble_at(
    parity: SeriesParity, t: float, N: int, count: int, base_seed: int, eta_fixed: complex | None = None
) -> np.ndarray:
    """F(t) at a single t for ``count`` streams, by direct summation."""
    kk = np.arange(1, N + 1)
    kf = kk.astype(float)
    tt = np.asarray(float(t))
    out = []
    for streams in _stream_blocks(count):
        X = phase_to_unit(batch_phases(base_seed, streams, N))[:, kk]
        if eta_fixed is not None:
            eta = np.full(len(streams), complex(eta_fixed))
        else:
            eta = batch_eta(base_seed, streams)
        if parity == "general":
            signs = batch_signs(base_seed, streams)
            vals = np.array(
                [X[i] @ (_basis(parity, int(sg), kf, tt) / kf) for i, sg in enumerate(signs)]
            )
        else:
            vals = X @ (_basis(parity, -1 if parity == "minus" else 1, kf, tt) / kf)
        out.append(eta / math.pi * vals)
    return np.concatenate(out)


def rough_norm(sampler: SteinhausSampler, y: int, N: int, grid: PathGrid) -> float:
    """Grid max of |symmetric-N sum - y-smooth sum|, i.e. the y-rough part.

    Uses the sampler's X_{-1} to choose the parity form; eta is irrelevant to
    the modulus and taken as 1.
    """
    if y >= N:
        return 0.0
    rough = index_mask(Truncation.symmetric(N)) & ~index_mask(Truncation.smooth(max(y, 2), N))
    X = sampler.values(N)[None, :]
    parity = "minus" if sampler.sign < 0 else "plus"
    vals = grid_values(X, np.ones(1), grid, rough, parity, np.array([sampler.sign]))
    return float(np.abs(vals).max())


def ensemble_manifest(spec: SeriesSpec, count: int, seed: int) -> dict:
    grid = spec.grid
    return {
        "seed": seed,
        "streams": [0, count - 1],
        "parity": spec.parity,
        "truncation": spec.truncation.manifest(),
        "grid": {"kind": grid.kind, "points": len(grid)},
        "eta": "sampled" if spec.eta is None else [spec.eta.real, spec.eta.imag],
        "mixer-id": MIXER_ID,
    }


def series_values_for(sampler: SteinhausSampler, eta: complex, spec: SeriesSpec) -> np.ndarray:
    """Evaluate ``spec`` for one explicit sampler (sign taken from the spec parity)."""
    N = spec.truncation.N
    X = sampler.values(N)[None, :]
    sign = -1 if spec.parity == "minus" else 1 if spec.parity == "plus" else sampler.sign
    return grid_values(X, np.array([eta]), spec.grid, index_mask(spec.truncation), spec.parity, np.array([sign]))[0]

