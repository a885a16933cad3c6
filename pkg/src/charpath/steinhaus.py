"""Counter-based Steinhaus random multiplicative functions.

Every phase is a pure function of ``(seed, stream, counter)`` through a
keyed splitmix64-style mixer, so values never depend on query order,
batching or thread count.  Counter 0 draws X_{-1}, counter 1 draws eta,
counter p >= 2 draws X_p.

Phases are kept as 53-bit fixed-point integers ``U`` with X = e(U / 2**53).
The multiplicative extension adds these integers modulo 2**53, which makes
X_{mn} = X_m X_n exact at the level of the stored phase.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .dirichlet import TWO_PI

MIXER_ID = "splitmix64-keyed-v1"
DEFAULT_CAPACITY = 2_000_000
PHASE_BITS = 53
PHASE_MASK = np.uint64((1 << PHASE_BITS) - 1)
PHASE_SCALE = 1.0 / (1 << PHASE_BITS)

COUNTER_SIGN = 0
COUNTER_ETA = 1

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SEED_SALT = np.uint64(0x6A09E667F3BCC908)
_STREAM_MUL = np.uint64(0xD1B54A32D192ED03)


class CapacityExceeded(ValueError):
    pass


class NotPrimeIndex(ValueError):
    pass


class ZeroIndex(ValueError):
    pass


def _mix(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    shape = z.shape
    z = z.reshape(-1)  # array arithmetic wraps silently; 0-d scalars would warn
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return (z ^ (z >> np.uint64(31))).reshape(shape)


def _arr(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=np.uint64))


def stream_key(seed: int, stream) -> np.ndarray:
    shape = np.shape(stream)
    seed_word = _mix(_arr(int(seed) & 0xFFFFFFFFFFFFFFFF) ^ _SEED_SALT)
    return _mix(seed_word ^ (_arr(stream) * _STREAM_MUL)).reshape(shape)


def raw_words(key: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """64-bit mixer output for every (key, counter) pair, broadcast."""
    key, counters = np.broadcast_arrays(
        np.asarray(key, dtype=np.uint64), np.asarray(counters, dtype=np.uint64)
    )
    shape = key.shape
    c = _arr(counters).reshape(-1)
    return _mix(_arr(key).reshape(-1) ^ _mix(c * _GOLDEN + _GOLDEN)).reshape(shape)


def unit_phase(words: np.ndarray) -> np.ndarray:
    """Top 53 bits of each word as an integer phase."""
    return np.asarray(words, dtype=np.uint64) >> np.uint64(64 - PHASE_BITS)


def phase_to_unit(U: np.ndarray) -> np.ndarray:
    return np.exp(TWO_PI * 1j * (np.asarray(U, dtype=np.uint64).astype(float) * PHASE_SCALE))


def default_seed() -> int:
    """Seed from ``CHARPATH_SEED``, else 0."""
    raw = os.environ.get("CHARPATH_SEED")
    return int(raw) if raw else 0


def spf_sieve(N: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..N (entries 0 and 1 are 0 and 1).

    Linear sieve, vectorised per prime: every composite n is written exactly
    once, as spf(n) * m with spf(m) >= spf(n).
    """
    N = int(N)
    if N < 2:
        raise ValueError("sieve bound must be at least 2")
    spf = np.zeros(N + 1, dtype=np.int64)
    spf[1] = 1
    p = 2
    while p * p <= N:
        if spf[p] == 0:
            m = np.arange(p, N // p + 1)
            s = spf[m]
            m = m[(s == 0) | (s >= p)]
            spf[p * m] = p
        p += 1
    unset = spf == 0
    unset[0] = False
    spf[unset] = np.nonzero(unset)[0]
    return spf


@lru_cache(maxsize=8)
def _cached_spf(N: int) -> np.ndarray:
    spf = spf_sieve(N)
    spf.setflags(write=False)
    return spf


@dataclass(frozen=True)
class _Layers:
    primes: np.ndarray
    # composite layers by number of prime factors (with multiplicity)
    layers: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]


@lru_cache(maxsize=8)
def _layers(N: int) -> _Layers:
    spf = _cached_spf(max(N, 2))[: N + 1]
    n = np.arange(N + 1)
    cof = np.zeros(N + 1, dtype=np.int64)
    cof[2:] = n[2:] // spf[2:]
    omega = np.zeros(N + 1, dtype=np.int64)
    cur = n.copy()
    live = cur > 1
    while live.any():
        omega[live] += 1
        cur[live] = cur[live] // spf[cur[live]]
        live = cur > 1
    primes = np.nonzero(omega == 1)[0]
    layers = []
    for w in range(2, int(omega.max(initial=1)) + 1):
        idx = np.nonzero(omega == w)[0]
        layers.append((idx, spf[idx], cof[idx]))
    return _Layers(primes, tuple(layers))


def primes_upto(N: int) -> np.ndarray:
    return _layers(int(N)).primes


def extend_phases(prime_phase: np.ndarray, N: int) -> np.ndarray:
    """Complete multiplicative extension of integer phases.

    ``prime_phase`` has shape (..., N+1) with entries set at primes; the
    result holds U_n for 1 <= n <= N (U_1 = 0, column 0 unused).
    """
    L = _layers(int(N))
    U = np.zeros(prime_phase.shape[:-1] + (N + 1,), dtype=np.uint64)
    U[..., L.primes] = prime_phase[..., L.primes]
    for idx, p, c in L.layers:
        U[..., idx] = (U[..., p] + U[..., c]) & PHASE_MASK
    return U


def batch_phases(seed: int, streams, N: int) -> np.ndarray:
    """Integer phases U_n (n <= N) for many streams: shape (len(streams), N+1)."""
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    keys = stream_key(seed, streams)[:, None]
    L = _layers(int(N))
    pp = np.zeros((len(streams), N + 1), dtype=np.uint64)
    pp[:, L.primes] = unit_phase(raw_words(keys, L.primes[None, :]))
    return extend_phases(pp, N)


def batch_signs(seed: int, streams) -> np.ndarray:
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    w = raw_words(stream_key(seed, streams), np.uint64(COUNTER_SIGN))
    return np.where((w >> np.uint64(63)) == 0, 1, -1)


def batch_eta(seed: int, streams) -> np.ndarray:
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    w = raw_words(stream_key(seed, streams), np.uint64(COUNTER_ETA))
    return phase_to_unit(unit_phase(w))


@dataclass(frozen=True)
class SeedSpec:
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= v < 1 << 64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def manifest(self) -> dict:
        return {"seed": self.seed, "stream": self.stream, "mixer": MIXER_ID}


@dataclass(frozen=True)
class SteinhausSampler:
    """Steinhaus X_n for 1 <= |n| <= capacity under one (seed, stream).

    ``sign_minus_one`` overrides the drawn X_{-1}; see :meth:`fix_sign`.
    """

    seed_spec: SeedSpec = SeedSpec()
    capacity: int = DEFAULT_CAPACITY
    sign_minus_one: int | None = None

    @property
    def key(self) -> np.ndarray:
        return stream_key(self.seed_spec.seed, self.seed_spec.stream)

    @property
    def sign(self) -> int:
        if self.sign_minus_one is not None:
            return self.sign_minus_one
        return int(batch_signs(self.seed_spec.seed, [self.seed_spec.stream])[0])

    def eta(self) -> complex:
        return complex(batch_eta(self.seed_spec.seed, [self.seed_spec.stream])[0])

    def _spf(self) -> np.ndarray:
        return _cached_spf(self.capacity)

    def _check(self, n: int) -> None:
        if n > self.capacity:
            raise CapacityExceeded(f"index {n} exceeds sampler capacity {self.capacity}")

    def prime_phase_int(self, p: int) -> int:
        return int(unit_phase(raw_words(self.key, np.uint64(p))))

    def phase(self, p: int) -> complex:
        """X_p for a prime p."""
        p = int(p)
        self._check(p)
        if p < 2 or self._spf()[p] != p:
            raise NotPrimeIndex(f"{p} is not prime")
        return complex(phase_to_unit(self.prime_phase_int(p)))

    def phase_int(self, n: int) -> int:
        """Integer phase of X_n for n >= 1, by spf factorisation."""
        n = int(n)
        self._check(n)
        spf = self._spf()
        total = 0
        while n > 1:
            p = int(spf[n])
            total += self.prime_phase_int(p)
            n //= p
        return total & int(PHASE_MASK)

    def value(self, n: int) -> complex:
        n = int(n)
        if n == 0:
            raise ZeroIndex("X_0 is undefined")
        x = complex(phase_to_unit(self.phase_int(abs(n))))
        return x if n > 0 else self.sign * x

    def values(self, N: int) -> np.ndarray:
        """X_n for 0 <= n <= N as a complex array (entry 0 is 0)."""
        self._check(N)
        U = batch_phases(self.seed_spec.seed, [self.seed_spec.stream], N)[0]
        X = phase_to_unit(U)
        X[0] = 0
        return X

    def fix_sign(self, s: int) -> "SteinhausSampler":
        if s not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return replace(self, sign_minus_one=s)


def phase_fraction(z: np.ndarray) -> np.ndarray:
    """arg z / 2 pi in [0, 1)."""
    return np.mod(np.angle(z) / TWO_PI, 1.0)
