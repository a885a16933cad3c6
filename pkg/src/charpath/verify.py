"""Invariant suites behind ``charpath verify``.

Each suite returns a list of :class:`Check` rows; a suite passes when every
row passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dirichlet import build_context, character_table, family_indices
from .moments import (
    beta,
    divisor_dN,
    divisor_lemma_check,
    hyper_kloosterman,
    ramanujan_check,
    ramanujan_tail,
    twisted_gauss_average,
    twisted_gauss_via_kloosterman,
    _ordered_products,
)
from .paths import PathGrid
from .randomseries import rough_norm
from .steinhaus import SeedSpec, SteinhausSampler


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: float
    passed: bool


def _le(name: str, value: float, bound: float) -> Check:
    return Check(name, float(value), float(bound), bool(value <= bound))


def orthogonality(moduli=(5, 7, 11, 101), tol: float = 1e-10) -> list[Check]:
    out = []
    for q in moduli:
        ctx = build_context(q)
        T = character_table(ctx, np.arange(q - 1), q - 1)[:, 1:]
        eye = np.eye(q - 1)
        rows = np.abs(T @ T.conj().T / ctx.phi - eye).max()
        cols = np.abs(T.conj().T @ T / ctx.phi - eye).max()
        out.append(_le(f"q={q} characters", rows, tol))
        out.append(_le(f"q={q} residues", cols, tol))
    return out


def gauss(moduli=(5, 101, 1009)) -> list[Check]:
    out = []
    for q in moduli:
        ctx = build_context(q)
        taus = ctx.gauss_sums()[family_indices(ctx, None)]
        err = np.abs(np.abs(taus) ** 2 - q).max()
        out.append(_le(f"q={q} max ||tau|^2 - q|", err, 1e-8 * q))
    return out


def divisor(samples: int = 10_000, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    xs = rng.integers(1, 10**6, size=(samples, 2))
    Ns = rng.integers(1, 5, size=(samples, 2))
    bad = sum(
        not divisor_lemma_check(int(a), int(b), int(m), int(n)) for (a, b), (m, n) in zip(xs, Ns)
    )
    out = [Check(f"{samples} random tuples, violations", bad, 0, bad == 0)]
    mismatch = sum(
        divisor_dN(N, x) != sum(1 for _ in _ordered_products(x, N, None))
        for N in range(1, 5)
        for x in range(1, 121)
    )
    out.append(Check("d_N against enumeration, x <= 120", mismatch, 0, mismatch == 0))
    worst = 0.0
    for _ in range(300):
        N, x, t = int(rng.integers(1, 4)), int(rng.integers(1, 2000)), float(rng.random())
        for parity in ("odd", "even"):
            b = abs(beta(N, t, x, parity=parity))
            worst = max(worst, b * x / (2**N * divisor_dN(N, x)))
    out.append(_le("max |beta| x / (2^N d_N(x))", worst, 1.0))
    return out


def deligne(moduli=(7, 11, 13), orders=(1, 2, 3)) -> list[Check]:
    out = []
    for q in moduli:
        ctx = build_context(q)
        for N in orders:
            bound = 2 * N * q ** ((N - 1) / 2)
            worst = diff = 0.0
            for a in range(1, q):
                for parity in ("odd", "even"):
                    avg = twisted_gauss_average(ctx, N, a, parity)
                    worst = max(worst, abs(avg))
                    if N == 2:
                        diff = max(diff, abs(avg - twisted_gauss_via_kloosterman(q, N, a, parity)))
            out.append(_le(f"q={q} N={N} max |average|", worst, bound))
            if N == 2:
                out.append(_le(f"q={q} N=2 against Kloosterman", diff, 1e-8))
        hk = max(abs(hyper_kloosterman(q, 2, b)) for b in range(1, q))
        out.append(_le(f"q={q} max |Kl_2|", hk, 2 * math.sqrt(q)))
    return out


def rough_medians(
    ys=(10, 100, 1000), seeds: int = 50, N: int = 10_000, grid: int = 512
) -> list[float]:
    g = PathGrid.uniform(grid)
    return [
        float(np.median([rough_norm(SteinhausSampler(SeedSpec(s), N), y, N, g) for s in range(seeds)]))
        for y in ys
    ]


def tail(ys=(10, 100, 1000), seeds: int = 50, N: int = 10_000, grid: int = 512) -> list[Check]:
    med = rough_medians(ys, seeds, N, grid)
    out = [Check(f"median rough norm y={y}", m, math.nan, True) for y, m in zip(ys, med)]
    for (y0, a), (y1, b) in zip(zip(ys, med), zip(ys[1:], med[1:])):
        out.append(_le(f"median y={y1} below y={y0}", b, a))
    return out


def ramanujan(A: int = 100_000) -> list[Check]:
    partial, rhs = ramanujan_check(2, A)
    est = ramanujan_tail(2, A)
    out = [
        _le("s=2 |partial + tail - rhs|", abs(partial + est - rhs), 1e-3),
        _le("s=2 |partial - rhs| - tail", abs(partial - rhs) - est, 1e-3),
    ]
    partial, rhs = ramanujan_check(3, A)
    out.append(_le("s=3 |partial - rhs|", abs(partial - rhs), 1e-6))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "orthogonality": orthogonality,
    "gauss": gauss,
    "divisor": divisor,
    "deligne": deligne,
    "tail": tail,
    "ramanujan": ramanujan,
}
