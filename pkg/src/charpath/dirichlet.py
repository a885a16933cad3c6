"""Dirichlet characters modulo an odd prime.

Characters are indexed against the smallest primitive root ``g``:
``chi_j(g**k) = e(j*k/(q-1))``.  All evaluation goes through a discrete-log
table built once per modulus.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Literal, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
TABLE_LIMIT = 1 << 25
DLOG_SENTINEL = 0xFFFFFFFF

Parity = Literal["odd", "even"]
CharFilter = Literal["all", "odd", "even", "nonprincipal"]

# rows per chunk when materialising character tables; bounds memory at
# roughly CHUNK_ELEMENTS complex doubles
CHUNK_ELEMENTS = 1 << 22


class NotPrime(ValueError):
    """Raised when a modulus is not an odd prime."""


class TableOverflow(ValueError):
    """Raised when a modulus exceeds the discrete-log table limit."""


class PrincipalCharacter(ValueError):
    """Raised when an operation needs a nonprincipal character."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    f = 3
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(q: int) -> int:
    phi = q - 1
    factors = prime_factors(phi)
    for g in range(2, q):
        if all(pow(g, phi // p, q) != 1 for p in factors):
            return g
    return 1  # q == 2 only; unreachable for odd primes


@dataclass(eq=False)
class PrimeContext:
    """Odd prime modulus with primitive root and discrete-log table.

    ``dlog[n]`` is the exponent ``k`` with ``g**k == n (mod q)`` for
    ``1 <= n < q``; ``dlog[0]`` holds -1.  ``powers[k] = g**k mod q``.
    Immutable after construction except for the lazily filled Gauss-sum
    cache, which is published atomically under a lock.
    """

    q: int
    g: int
    dlog: np.ndarray
    powers: np.ndarray
    roots: np.ndarray = field(repr=False)
    _gauss: np.ndarray | None = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def phi(self) -> int:
        return self.q - 1

    def character(self, j: int) -> "Character":
        if not 0 <= j < self.q - 1:
            raise ValueError(f"character index must lie in [0, {self.q - 2}], got {j}")
        return Character(self, int(j))

    def gauss_sums(self) -> np.ndarray:
        """tau(chi_j) for every j, by direct O(q) summation per character."""
        cache = self._gauss
        if cache is not None:
            return cache
        with self._lock:
            if self._gauss is None:
                js = np.arange(self.q - 1)
                n = np.arange(1, self.q)
                additive = np.exp(TWO_PI * 1j * n / self.q)
                out = np.empty(self.q - 1, dtype=complex)
                for rows in _chunks(js, self.q):
                    table = character_table(self, rows, self.q - 1)
                    out[rows] = table[:, 1:] @ additive
                out.setflags(write=False)
                self._gauss = out
            return self._gauss


@dataclass(frozen=True)
class Character:
    ctx: PrimeContext = field(repr=False)
    j: int

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def parity(self) -> Parity:
        return parity(self)

    @property
    def is_principal(self) -> bool:
        return self.j == 0

    def __call__(self, n: int) -> complex:
        return char_value(self, n)


def _dlog_table(q: int, g: int) -> tuple[np.ndarray, np.ndarray]:
    powers = np.empty(q - 1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        powers[k] = x
        x = x * g % q
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[powers] = np.arange(q - 1, dtype=np.int64)
    return dlog, powers


def _cache_path(cache_dir: str | os.PathLike, q: int) -> Path:
    return Path(cache_dir) / f"q{q}.dlog"


def save_dlog(ctx: PrimeContext, cache_dir: str | os.PathLike) -> Path:
    """Write ``cache_dir/q<q>.dlog`` (little-endian uint32, entry 0 sentinel)."""
    path = _cache_path(cache_dir, ctx.q)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = ctx.dlog.astype("<u4")
    raw[0] = DLOG_SENTINEL
    tmp = path.with_suffix(".tmp")
    raw.tofile(tmp)
    os.replace(tmp, path)
    return path


def load_dlog(q: int, cache_dir: str | os.PathLike) -> np.ndarray | None:
    """Load and validate a cached table; None if missing or corrupt."""
    path = _cache_path(cache_dir, q)
    if not path.is_file():
        return None
    raw = np.fromfile(path, dtype="<u4")
    if raw.shape != (q,) or raw[0] != DLOG_SENTINEL:
        return None
    dlog = raw.astype(np.int64)
    dlog[0] = -1
    body = dlog[1:]
    if body.min() < 0 or body.max() >= q - 1:
        return None
    g = smallest_primitive_root(q)
    powers = np.empty(q - 1, dtype=np.int64)
    powers[body] = np.arange(1, q)
    # round trip: consecutive powers differ by a factor g
    if powers[0] != 1 or np.any(powers[1:] != powers[:-1] * g % q):
        return None
    return dlog


def build_context(
    q: int, cache_dir: str | os.PathLike | None = None, limit: int = TABLE_LIMIT
) -> PrimeContext:
    """Build the character context for an odd prime ``q``.

    When ``cache_dir`` is given the discrete-log table is read from (or
    written to) ``cache_dir/q<q>.dlog``; a cache hit is validated before use
    and yields a context identical to a fresh build.
    """
    q = int(q)
    if q < 3 or not is_prime(q):
        raise NotPrime("modulus must be an odd prime")
    if q > limit:
        raise TableOverflow(f"modulus {q} exceeds table limit {limit}")
    g = smallest_primitive_root(q)
    dlog = load_dlog(q, cache_dir) if cache_dir is not None else None
    if dlog is None:
        dlog, powers = _dlog_table(q, g)
        ctx = _make(q, g, dlog, powers)
        if cache_dir is not None:
            save_dlog(ctx, cache_dir)
        return ctx
    powers = np.empty(q - 1, dtype=np.int64)
    powers[dlog[1:]] = np.arange(1, q)
    return _make(q, g, dlog, powers)


def _make(q: int, g: int, dlog: np.ndarray, powers: np.ndarray) -> PrimeContext:
    roots = np.exp(TWO_PI * 1j * np.arange(q - 1) / (q - 1))
    for arr in (dlog, powers, roots):
        arr.setflags(write=False)
    return PrimeContext(q=q, g=g, dlog=dlog, powers=powers, roots=roots)


def char_value(chi: Character, n: int) -> complex:
    ctx = chi.ctx
    r = int(n) % ctx.q
    if r == 0:
        return 0j
    return complex(ctx.roots[chi.j * int(ctx.dlog[r]) % (ctx.q - 1)])


def parity(chi: Character) -> Parity:
    # chi_j(-1) = e(j/2) since dlog(-1) = (q-1)/2
    return "odd" if chi.j % 2 else "even"


def gauss_sum(chi: Character) -> complex:
    """tau(chi) = sum_{n=1}^{q-1} chi(n) e(n/q); filled into the context cache."""
    return complex(chi.ctx.gauss_sums()[chi.j])


def character_indices(ctx: PrimeContext, filter: CharFilter = "all") -> np.ndarray:
    js = np.arange(ctx.q - 1)
    if filter == "all":
        return js
    if filter == "odd":
        return js[1::2]
    if filter == "even":
        return js[0::2]
    if filter == "nonprincipal":
        return js[1:]
    raise ValueError(f"unknown character filter {filter!r}")


def enumerate_characters(ctx: PrimeContext, filter: CharFilter = "all") -> list[Character]:
    return [Character(ctx, int(j)) for j in character_indices(ctx, filter)]


def family_indices(ctx: PrimeContext, parity: str | None) -> np.ndarray:
    """Nonprincipal character indices, optionally restricted by parity."""
    if parity in (None, "all", "nonprincipal"):
        return character_indices(ctx, "nonprincipal")
    js = character_indices(ctx, parity)  # type: ignore[arg-type]
    return js[js != 0]


def character_table(ctx: PrimeContext, js: Sequence[int] | np.ndarray, n_max: int) -> np.ndarray:
    """Values chi_j(n) for the given indices and 0 <= n <= n_max.

    Column ``n`` holds ``chi_j(n)``; columns at multiples of q are zero.
    """
    js = np.asarray(js, dtype=np.int64)
    n = np.arange(n_max + 1)
    r = n % ctx.q
    logs = ctx.dlog[r]
    unit = r != 0
    idx = (js[:, None] * np.where(unit, logs, 0)[None, :]) % (ctx.q - 1)
    table = ctx.roots[idx]
    table[:, ~unit] = 0
    return table


def _chunks(js: np.ndarray, width: int) -> Iterator[np.ndarray]:
    step = max(1, CHUNK_ELEMENTS // max(width, 1))
    for start in range(0, len(js), step):
        yield js[start : start + step]


def chunked(js: np.ndarray, width: int) -> list[np.ndarray]:
    """Split character indices into row blocks sized for ``width`` columns."""
    return list(_chunks(np.asarray(js), width))
