"""Normalised character sums S_chi(t), polygonal paths f_chi(t) and their
Gauss-sum Fourier expansions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence, Union

import numpy as np

from .dirichlet import (
    Character,
    PrimeContext,
    PrincipalCharacter,
    TWO_PI,
    char_value,
    character_table,
    chunked,
    gauss_sum,
)
from ._parallel import ordered_map

Real = Union[float, int, Fraction]


@dataclass(frozen=True)
class PathGrid:
    """Sorted t values in [0, 1].

    ``vertex`` grids carry the exact rationals j/q in ``fractions`` so path
    evaluation never goes through a rounded q*t.
    """

    points: np.ndarray
    kind: Literal["vertex", "uniform", "custom"]
    fractions: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or len(pts) == 0:
            raise ValueError("grid must be a non-empty 1-d sequence")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if pts[0] < 0 or pts[-1] > 1:
            raise ValueError("grid points must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def vertex(cls, q: int) -> "PathGrid":
        fr = tuple(Fraction(j, q) for j in range(q + 1))
        return cls(np.arange(q + 1) / q, "vertex", fr)

    @classmethod
    def uniform(cls, count: int) -> "PathGrid":
        """``count`` equally spaced points including both endpoints."""
        if count < 2:
            raise ValueError("uniform grid needs at least 2 points")
        return cls(np.linspace(0.0, 1.0, count), "uniform")

    @classmethod
    def of(cls, points: Sequence[Real]) -> "PathGrid":
        fr = tuple(Fraction(p) if isinstance(p, (int, Fraction)) else None for p in points)
        arr = np.array([float(p) for p in points])
        return cls(arr, "custom", fr if all(f is not None for f in fr) else None)


@dataclass(frozen=True)
class CharacterPath:
    chi: Character
    grid: PathGrid
    values: np.ndarray


def parse_t(text: str) -> Real:
    """Parse ``"0.25"`` or a rational ``"j/q"``."""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return float(text)


def split_qt(q: int, t: Real) -> tuple[int, float]:
    """Integer and fractional part of q*t.

    Rationals are split exactly; floats within 1e-9 (relative) of an
    integer snap to it, rounding half to even.
    """
    if isinstance(t, (Fraction, int)):
        x = Fraction(t) * q
        whole = math.floor(x)
        return whole, float(x - whole)
    x = q * float(t)
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return int(r), 0.0
    whole = math.floor(x)
    return whole, x - whole


def _check_t(t: Real) -> None:
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")


def _reduced(chi: Character, m: int) -> int:
    # a full period of a nonprincipal character sums to zero
    return m if chi.is_principal else m % chi.q


def partial_sum(chi: Character, t: Real) -> complex:
    """S_chi(t) = q^{-1/2} sum_{n <= qt} chi(n)."""
    _check_t(t)
    q = chi.q
    m, _ = split_qt(q, t)
    row = character_table(chi.ctx, [chi.j], _reduced(chi, m))[0]
    return complex(row[1:].sum()) / math.sqrt(q)


def path_value(chi: Character, t: Real) -> complex:
    """f_chi(t) = S_chi(t) + ({qt}/sqrt q) chi(ceil qt)."""
    _check_t(t)
    q = chi.q
    m, frac = split_qt(q, t)
    row = character_table(chi.ctx, [chi.j], _reduced(chi, m))[0]
    s = complex(row[1:].sum())
    if frac > 0:
        s += frac * char_value(chi, m + 1)
    return s / math.sqrt(q)


def vertex_sums(ctx: PrimeContext, js: Sequence[int] | np.ndarray) -> np.ndarray:
    """Unnormalised partial sums sum_{n<=j} chi(n), j = 0..q, one row per character."""
    js = np.asarray(js, dtype=np.int64)
    table = character_table(ctx, js, ctx.q)
    table[:, 0] = 0
    sums = np.cumsum(table, axis=1)
    sums[js != 0, ctx.q] = 0
    return sums


def _grid_split(q: int, grid: PathGrid) -> tuple[np.ndarray, np.ndarray]:
    if grid.fractions is not None:
        parts = [split_qt(q, f) for f in grid.fractions]
    else:
        parts = [split_qt(q, float(t)) for t in grid.points]
    whole = np.array([p[0] for p in parts], dtype=np.int64)
    frac = np.array([p[1] for p in parts], dtype=float)
    return whole, frac


def family_path_values(
    ctx: PrimeContext, js: Sequence[int] | np.ndarray, grid: PathGrid, threads: int = 1
) -> np.ndarray:
    """f_chi(t) for every listed character (rows) and grid point (columns).

    One O(q) accumulation per character; rows are processed in blocks.
    """
    js = np.asarray(js, dtype=np.int64)
    q = ctx.q
    whole, frac = _grid_split(q, grid)
    nxt = np.minimum(whole + 1, q)

    def block(rows: np.ndarray) -> np.ndarray:
        table = character_table(ctx, rows, q)
        table[:, 0] = 0
        sums = np.cumsum(table, axis=1)
        # a nonprincipal character sums to zero over a full period
        sums[rows != 0, q] = 0
        return (sums[:, whole] + frac[None, :] * table[:, nxt]) / math.sqrt(q)

    if len(js) == 0:
        return np.zeros((0, len(grid)), dtype=complex)
    return np.vstack(ordered_map(block, chunked(js, q + 1), threads))


def sample_path(chi: Character, grid: PathGrid) -> CharacterPath:
    values = family_path_values(chi.ctx, [chi.j], grid)[0]
    values.setflags(write=False)
    return CharacterPath(chi, grid, values)


def fourier_path(chi: Character, t: Real, K: int | None = None, form: str = "general") -> complex:
    """Truncated Gauss-sum Fourier expansion of f_chi at t.

    ``form="general"`` sums over 0 < |k| <= K using chi-bar(-k) =
    chi(-1) chi-bar(k).  ``form="parity"`` uses the paired real-trig forms:
    ``tau/(pi i sqrt q) sum (chibar(k)/k)(1 - cos 2 pi k t)`` for odd chi
    and ``tau/(pi sqrt q) sum (chibar(k)/k) sin 2 pi k t`` for even chi.
    """
    if chi.is_principal:
        raise PrincipalCharacter("Fourier expansion needs a nonprincipal character")
    q = chi.q
    K = q - 1 if K is None else int(K)
    if not 1 <= K <= q - 1:
        raise ValueError(f"cutoff K must lie in [1, {q - 1}]")
    t = float(t)
    k = np.arange(1, K + 1)
    cbar = np.conj(character_table(chi.ctx, [chi.j], K)[0, 1:])
    tau = gauss_sum(chi)
    sign = -1.0 if chi.j % 2 else 1.0
    if form == "general":
        pos = (cbar / k) * (1 - np.exp(-TWO_PI * 1j * k * t))
        # k -> -k: chibar(-k)/(-k) (1 - e(kt))
        neg = (sign * cbar / (-k)) * (1 - np.exp(TWO_PI * 1j * k * t))
        total = pos.sum() + neg.sum()
        return complex(tau / (TWO_PI * 1j * math.sqrt(q)) * total)
    if form == "parity":
        if sign < 0:
            total = np.sum(cbar / k * (1 - np.cos(TWO_PI * k * t)))
            return complex(tau / (math.pi * 1j * math.sqrt(q)) * total)
        total = np.sum(cbar / k * np.sin(TWO_PI * k * t))
        return complex(tau / (math.pi * math.sqrt(q)) * total)
    raise ValueError(f"unknown form {form!r}")


def max_abs_sum(chi: Character) -> float:
    """max_t |S_chi(t)|, exact over the q+1 vertex values."""
    return float(family_max_abs(chi.ctx, [chi.j])[0])


def family_max_abs(
    ctx: PrimeContext, js: Sequence[int] | np.ndarray, threads: int = 1
) -> np.ndarray:
    js = np.asarray(js, dtype=np.int64)

    def block(rows: np.ndarray) -> np.ndarray:
        return np.abs(vertex_sums(ctx, rows)).max(axis=1)

    if len(js) == 0:
        return np.zeros(0)
    return np.concatenate(ordered_map(block, chunked(js, ctx.q + 1), threads)) / math.sqrt(ctx.q)
