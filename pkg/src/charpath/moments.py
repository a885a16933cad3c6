"""Moment sequences of character paths and of the limiting random series.

Weights: ``w(y, t) = 1 - cos(2 pi y t)`` for the odd family (F_-) and
``sin(2 pi y t)`` for the even family (F_+).  With these,

    beta_{N,t}(x) = (1/x) sum_{y_1...y_N = x} prod_j w(y_j, t)
    B_{N,t}(x)    = sum_{x_1...x_k = x} prod_i beta_{N_i,t_i}(x_i)
    M(n, m)       = pi^{-2n} sum_{a>=1} B_{n,t}(a) B_{m,t}(a)   (|n| = |m|)

Scalar ``beta``/``calB`` enumerate ordered factorisations recursively; the
array routines build the same quantities as Dirichlet convolutions, which is
what the moment sums use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from .dirichlet import (
    PrimeContext,
    TWO_PI,
    character_indices,
    family_indices,
    character_table,
)
from .paths import PathGrid, family_path_values

MomentParity = Literal["odd", "even"]


class ParityMismatch(ValueError):
    """Raised when a method needs |n| == |m|."""


class TooLarge(ValueError):
    """Raised when a direct enumeration would be unaffordable."""


@dataclass(frozen=True)
class MomentSpec:
    t: tuple
    n: tuple[int, ...]
    m: tuple[int, ...]
    parity: MomentParity = "odd"

    def __post_init__(self):
        t = tuple(self.t)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        if not (len(t) == len(self.n) == len(self.m)) or not t:
            raise ValueError("t, n and m must have the same positive length")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("t must be strictly increasing")
        if any(not 0 <= x <= 1 for x in t):
            raise ValueError("t must lie in [0, 1]")
        if min(self.n + self.m) < 0 or sum(self.n) + sum(self.m) < 1:
            raise ValueError("n, m must be nonnegative with |n| + |m| >= 1")
        if self.parity not in ("odd", "even"):
            raise ValueError(f"unknown parity {self.parity!r}")

    @property
    def k(self) -> int:
        return len(self.t)

    @property
    def n_total(self) -> int:
        return sum(self.n)

    @property
    def m_total(self) -> int:
        return sum(self.m)

    def swapped(self) -> "MomentSpec":
        return MomentSpec(self.t, self.m, self.n, self.parity)


@dataclass(frozen=True)
class MomentResult:
    value: complex
    method: Literal["direct", "sigma_formula", "limit", "full_formula", "fourier"]
    truncation: int | None = None
    error_estimate: float = 0.0
    q: int | None = None
    spec: MomentSpec | None = field(default=None, compare=False)
    extras: dict = field(default_factory=dict, compare=False)

    def record(self) -> dict:
        s = self.spec
        out = {}
        if self.q is not None:
            out["q"] = self.q
        if s is not None:
            out.update(
                k=s.k,
                t=[_t_repr(x) for x in s.t],
                n=list(s.n),
                m=list(s.m),
                parity=s.parity,
            )
        out.update(
            method=self.method,
            re=self.value.real,
            im=self.value.imag,
            error_estimate=self.error_estimate,
            truncation=self.truncation,
        )
        return out


def _t_repr(t) -> float | str:
    if isinstance(t, Fraction) and t.denominator != 1:
        return f"{t.numerator}/{t.denominator}"
    return float(t)


# ---------------------------------------------------------------------------
# divisor functions


def factorize(x: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= x:
        while x % d == 0:
            out[d] = out.get(d, 0) + 1
            x //= d
        d += 1 if d == 2 else 2
    if x > 1:
        out[x] = out.get(x, 0) + 1
    return out


def divisor_dN(N: int, x: int) -> int:
    """Number of ordered N-tuples of positive integers with product x."""
    if N < 1 or x < 1:
        raise ValueError("divisor_dN needs N >= 1 and x >= 1")
    result = 1
    for a in factorize(int(x)).values():
        result *= math.comb(a + N - 1, N - 1)
    return result


def divisor_lemma_check(x1: int, x2: int, N1: int, N2: int) -> bool:
    """d_{N1}(x1) d_{N2}(x2) <= d_{N1+N2}(x1 x2)."""
    return divisor_dN(N1, x1) * divisor_dN(N2, x2) <= divisor_dN(N1 + N2, x1 * x2)


def divisor_counts(A: int) -> np.ndarray:
    """d(n) for 0 <= n <= A (entry 0 unused)."""
    d = np.zeros(A + 1, dtype=np.int64)
    for i in range(1, A + 1):
        d[i::i] += 1
    return d


# ---------------------------------------------------------------------------
# beta and calB, scalar route


def _weight(parity: str, y: int, t: float) -> float:
    x = TWO_PI * y * float(t)
    if parity in ("odd", "minus"):
        return 1.0 - math.cos(x)
    if parity in ("even", "plus"):
        return math.sin(x)
    raise ValueError(f"unknown parity {parity!r}")


def _divisors(x: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= x:
        if x % d == 0:
            small.append(d)
            if d * d != x:
                large.append(x // d)
        d += 1
    return small + large[::-1]


def _ordered_products(x: int, parts: int, cap: int | None):
    """Yield ordered tuples of ``parts`` positive integers (each <= cap) with product x."""
    if parts == 0:
        if x == 1:
            yield ()
        return
    if parts == 1:
        if cap is None or x <= cap:
            yield (x,)
        return
    for d in _divisors(x):
        if cap is not None and d > cap:
            break
        for rest in _ordered_products(x // d, parts - 1, cap):
            yield (d,) + rest


def beta(N: int, t: float, x: int, cap: int | None = None, parity: str = "odd") -> float:
    """beta_{N,t}(x), or the q-capped beta_{N,q,t}(x) when ``cap=q``.

    The capped form restricts every factor to y <= q and vanishes when q | x.
    """
    if N < 0 or x < 1:
        raise ValueError("beta needs N >= 0 and x >= 1")
    if cap is not None and x % cap == 0:
        return 0.0
    total = 0.0
    for ys in _ordered_products(int(x), N, cap):
        prod = 1.0
        for y in ys:
            prod *= _weight(parity, y, t)
        total += prod
    return total / x


def calB(
    Ns: Sequence[int], ts: Sequence[float], x: int, cap: int | None = None, parity: str = "odd"
) -> float:
    """B_{N,t}(x) = sum over x_1...x_k = x of prod beta_{N_i,t_i}(x_i).

    With ``cap=q`` each x_i is limited to q**N_i, the betas are capped and the
    result vanishes when q | x.
    """
    Ns = list(Ns)
    ts = list(ts)
    if len(Ns) != len(ts):
        raise ValueError("Ns and ts must have equal length")
    if cap is not None and x % cap == 0:
        return 0.0
    return _calB_rec(Ns, ts, int(x), cap, parity)


def _calB_rec(Ns, ts, x, cap, parity) -> float:
    if len(Ns) == 1:
        if cap is not None and x > cap ** Ns[0]:
            return 0.0
        return beta(Ns[0], ts[0], x, cap, parity)
    total = 0.0
    for d in _divisors(x):
        if cap is not None and d > cap ** Ns[0]:
            continue
        b = beta(Ns[0], ts[0], d, cap, parity)
        if b:
            total += b * _calB_rec(Ns[1:], ts[1:], x // d, cap, parity)
    return total


# ---------------------------------------------------------------------------
# array route


def dirichlet_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """(f * g)(n) = sum_{d | n} f(d) g(n/d) for 1 <= n <= A; index 0 unused."""
    A = len(f) - 1
    h = np.zeros(A + 1, dtype=np.result_type(f, g))
    nz = np.nonzero(f[1:])[0] + 1
    for d in nz:
        top = A // d
        h[d : d * top + 1 : d] += f[d] * g[1 : top + 1]
    return h


def _unit(A: int) -> np.ndarray:
    e = np.zeros(A + 1)
    e[1] = 1.0
    return e


def weight_array(t: float, A: int, parity: str, cap: int | None = None) -> np.ndarray:
    y = np.arange(A + 1, dtype=float)
    x = TWO_PI * y * float(t)
    w = 1 - np.cos(x) if parity in ("odd", "minus") else np.sin(x)
    w[0] = 0
    if cap is not None:
        w[cap:] = 0  # y <= q and (y, q) = 1 leaves y < q
    return w


def calB_array(
    Ns: Sequence[int], ts: Sequence[float], A: int, parity: str = "odd", cap: int | None = None
) -> np.ndarray:
    """B_{N,t}(x) for 0 <= x <= A as an array, via Dirichlet convolution."""
    G = _unit(A)
    for N, t in zip(Ns, ts):
        if N == 0:
            continue
        w = weight_array(t, A, parity, cap)
        for _ in range(N):
            G = dirichlet_convolve(w, G)
    out = np.zeros(A + 1)
    out[1:] = G[1:] / np.arange(1, A + 1)
    if cap is not None:
        out[::cap] = 0
    return out


def beta_array(N: int, t: float, A: int, parity: str = "odd", cap: int | None = None) -> np.ndarray:
    return calB_array([N], [t], A, parity, cap)


# ---------------------------------------------------------------------------
# moments


def _family(ctx: PrimeContext, parity: str) -> np.ndarray:
    return family_indices(ctx, parity)


def _product(vals: np.ndarray, spec: MomentSpec) -> np.ndarray:
    prod = np.ones(vals.shape[0], dtype=complex)
    for i in range(spec.k):
        v = vals[:, i]
        if spec.n[i]:
            prod *= v ** spec.n[i]
        if spec.m[i]:
            prod *= np.conj(v) ** spec.m[i]
    return prod


def Mq_direct(ctx: PrimeContext, spec: MomentSpec, threads: int = 1) -> MomentResult:
    """(2/phi(q)) sum over the parity family of prod f(t_i)^n_i conj(f(t_i))^m_i.

    The principal character is left out of the even family.
    """
    if ctx.q < 5:
        raise ValueError("Mq_direct needs q >= 5")
    js = _family(ctx, spec.parity)
    grid = PathGrid.of(list(spec.t))
    vals = family_path_values(ctx, js, grid, threads)
    value = 2.0 / ctx.phi * _pairwise_sum(_product(vals, spec))
    return MomentResult(complex(value), "direct", None, 0.0, ctx.q, spec)


def Mq_fourier(ctx: PrimeContext, spec: MomentSpec) -> MomentResult:
    """Same average as :func:`Mq_direct` with f replaced by its parity Fourier form (K = q-1)."""
    from .paths import fourier_path

    js = _family(ctx, spec.parity)
    vals = np.array(
        [[fourier_path(ctx.character(int(j)), t, form="parity") for t in spec.t] for j in js]
    )
    value = 2.0 / ctx.phi * _pairwise_sum(_product(vals, spec))
    return MomentResult(complex(value), "fourier", ctx.q - 1, 0.0, ctx.q, spec)


def sigma_terms(q: int, spec: MomentSpec) -> tuple[float, float]:
    """(Sigma_+, Sigma_-) restricted to 1 <= a < q with uncapped B."""
    n = spec.n_total
    if n != spec.m_total:
        raise ParityMismatch("the Sigma form requires |n| == |m|")
    Bn = calB_array(spec.n, spec.t, q - 1, spec.parity)
    Bm = Bn if spec.n == spec.m else calB_array(spec.m, spec.t, q - 1, spec.parity)
    a = np.arange(1, q)
    plus = _pairwise_sum(Bn[a] * Bm[a])
    minus = _pairwise_sum(Bn[a] * Bm[q - a])
    return float(plus), float(minus)


def Mq_sigma(ctx: PrimeContext | int, spec: MomentSpec) -> MomentResult:
    """pi^{-2n} (Sigma_+ -/+ Sigma_-): minus for odd, plus for even characters."""
    q = ctx.q if isinstance(ctx, PrimeContext) else int(ctx)
    n = spec.n_total
    if n != spec.m_total:
        raise ParityMismatch("the Sigma form requires |n| == |m|")
    plus, minus = sigma_terms(q, spec)
    sgn = -1.0 if spec.parity == "odd" else 1.0
    value = (plus + sgn * minus) / math.pi ** (2 * n)
    err = math.log(q) ** (2 * n) / math.sqrt(q)
    return MomentResult(
        complex(value), "sigma_formula", q - 1, err, q, spec, {"sigma_plus": plus, "sigma_minus": minus}
    )


def Mq_full(ctx: PrimeContext, spec: MomentSpec) -> MomentResult:
    """Unreduced double sum over a <= q^n, b <= q^m with capped B and the
    twisted Gauss-sum average; only for q <= 11 and n + m <= 3.

    Equals the average of the parity Fourier forms exactly.
    """
    q = ctx.q
    n, m = spec.n_total, spec.m_total
    if q > 11 or n + m > 3:
        raise TooLarge("full double-sum form limited to q <= 11 and n + m <= 3")
    A, B = q**n, q**m
    Bn = calB_array(spec.n, spec.t, A, spec.parity, cap=q)
    Bm = calB_array(spec.m, spec.t, B, spec.parity, cap=q)
    js = _family(ctx, spec.parity)
    taus = ctx.gauss_sums()[js]
    top = max(A, B)
    table = character_table(ctx, js, top)
    # sum_a Bn(a) chibar(a) and sum_b Bm(b) chi(b), per character
    left = np.conj(table[:, : A + 1]) @ Bn
    right = table[:, : B + 1] @ Bm
    inner = left * right * taus**n * np.conj(taus) ** m
    avg = 2.0 / ctx.phi * _pairwise_sum(inner)
    pref = 1.0 / (math.pi * math.sqrt(q)) ** (n + m)
    if spec.parity == "odd":
        pref = pref / (1j ** (n - m))
    return MomentResult(complex(pref * avg), "full_formula", None, 0.0, q, spec)


def _limit_partial(spec: MomentSpec, A: int) -> np.ndarray:
    Bn = calB_array(spec.n, spec.t, A, spec.parity)
    Bm = Bn if spec.n == spec.m else calB_array(spec.m, spec.t, A, spec.parity)
    return Bn * Bm


def M_limit(spec: MomentSpec, A: int = 100_000) -> MomentResult:
    """Limiting moment pi^{-2n} sum_{a<=A} B_n(a) B_m(a).

    Zero exactly when |n| != |m| (the eta average vanishes).  The error
    estimate is the Cauchy difference between cutoffs 2A and A.
    """
    if A < 1:
        raise ValueError("cutoff A must be at least 1")
    n = spec.n_total
    if n != spec.m_total:
        return MomentResult(0j, "limit", A, 0.0, None, spec)
    terms = _limit_partial(spec, 2 * A)
    scale = math.pi ** (2 * n)
    head = _pairwise_sum(terms[1 : A + 1]) / scale
    tail = _pairwise_sum(terms[A + 1 :]) / scale
    return MomentResult(complex(head), "limit", A, abs(float(tail)), None, spec)


def M_limit_single_loop(t: float, A: int, parity: str = "odd") -> float:
    """k = 1, n = m = (1) limit by one explicit loop: pi^{-2} sum w(a,t)^2 / a^2."""
    total = 0.0
    for a in range(1, A + 1):
        w = _weight(parity, a, t)
        total += w * w / (a * a)
    return total / math.pi**2


def _pairwise_sum(x: np.ndarray):
    # numpy's sum is pairwise along contiguous 1-d data, so the order is fixed
    return np.sum(np.ascontiguousarray(x))


# ---------------------------------------------------------------------------
# Gauss sums, hyper-Kloosterman sums


def hyper_kloosterman(q: int, N: int, b: int) -> complex:
    """sum over x_1...x_N = b (mod q) of e((x_1 + ... + x_N)/q), by enumeration."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > 3 or q > 101:
        raise TooLarge("hyper-Kloosterman enumeration limited to N <= 3, q <= 101")
    if b % q == 0:
        raise ValueError("b must be coprime to q")
    units = np.arange(1, q)
    inv = np.array([pow(int(x), -1, q) for x in units])
    inv_of = np.zeros(q, dtype=np.int64)
    inv_of[units] = inv
    if N == 1:
        return complex(np.exp(TWO_PI * 1j * (b % q) / q))
    grids = np.meshgrid(*([units] * (N - 1)), indexing="ij")
    free = [g.reshape(-1) for g in grids]
    prod = np.ones_like(free[0])
    for f in free:
        prod = prod * f % q
    last = (b % q) * inv_of[prod] % q
    s = sum(free) + last
    return complex(np.sum(np.exp(TWO_PI * 1j * (s % q) / q)))


def twisted_gauss_average(ctx: PrimeContext, N: int, a: int, parity: MomentParity) -> complex:
    """(2/phi(q)) sum_{chi(-1) = sigma} chi(a) tau(chi)^N.

    Averages over the full parity class, principal character included.
    """
    if a % ctx.q == 0:
        raise ValueError("a must be coprime to q")
    js = character_indices(ctx, parity)
    chi_a = ctx.roots[(js * int(ctx.dlog[a % ctx.q])) % (ctx.q - 1)]
    taus = ctx.gauss_sums()[js]
    return complex(2.0 / ctx.phi * np.sum(chi_a * taus**N))


def twisted_gauss_via_kloosterman(q: int, N: int, a: int, parity: MomentParity) -> complex:
    """HK(a^{-1}) + sigma HK(-a^{-1}), the exponential-sum form of the average."""
    ainv = pow(int(a), -1, q)
    sigma = 1 if parity == "even" else -1
    return hyper_kloosterman(q, N, ainv) + sigma * hyper_kloosterman(q, N, (-ainv) % q)


def character_average_order0(ctx: PrimeContext, a: int, parity: MomentParity) -> complex:
    """(2/phi(q)) sum_{chi(-1)=sigma} chi(a) by explicit character values."""
    chis = [ctx.character(int(j)) for j in character_indices(ctx, parity)]
    return 2.0 / ctx.phi * sum(chi(a) for chi in chis)


# ---------------------------------------------------------------------------
# zeta and the d(n)^2 identity


# B_2, B_4, ..., B_16
_BERNOULLI = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
]


def zeta(s: float, M: int = 20) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin with 8 correction terms."""
    if s <= 1:
        raise ValueError("zeta needs s > 1")
    head = sum(n ** -s for n in range(1, M))
    total = head + M ** (1 - s) / (s - 1) + 0.5 * M**-s
    rising = s  # s (s+1) ... (s+2k-2)
    fact = 2  # (2k)!
    for k, b in enumerate(_BERNOULLI, start=1):
        total += float(b) / fact * rising * M ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
    return total


@lru_cache(maxsize=4)
def _divisor_squares(A: int) -> np.ndarray:
    d = divisor_counts(A).astype(float)
    return d * d


def ramanujan_check(s: float, A: int = 100_000) -> tuple[float, float]:
    """(sum_{n<=A} d(n)^2 / n^s, zeta(s)^4 / zeta(2s))."""
    if s <= 1:
        raise ValueError("s must exceed 1")
    d2 = _divisor_squares(int(A))
    n = np.arange(1, A + 1, dtype=float)
    partial = float(_pairwise_sum(d2[1:] / n**s))
    return partial, zeta(s) ** 4 / zeta(2 * s)


def ramanujan_tail(s: float, A: int = 100_000) -> float:
    """Estimate of sum_{n>A} d(n)^2 / n^s.

    Fits D(x) = sum_{n<=x} d(n)^2 as x P(log x) with P cubic on [A/100, A]
    and integrates x^{-s} dD(x) from A to infinity in closed form.
    """
    d2 = _divisor_squares(int(A))
    D = np.cumsum(d2)
    xs = np.unique(np.geomspace(max(A // 100, 10), A, 400).astype(int))
    L = np.log(xs)
    coef = np.polyfit(L, D[xs] / xs, 3)  # highest power first
    L0 = math.log(A)
    alpha = s - 1

    def integral(j: int) -> float:
        # int_{L0}^inf e^{-alpha u} u^j du
        return math.exp(-alpha * L0) * sum(
            math.factorial(j) / math.factorial(j - i) * L0 ** (j - i) / alpha ** (i + 1)
            for i in range(j + 1)
        )

    # x^{-s} dD = x^{-s} (P(L) + P'(L)) dx, dx = x du
    deriv = np.polyder(coef)
    total = 0.0
    for c, j in zip(coef, range(3, -1, -1)):
        total += c * integral(j)
    for c, j in zip(deriv, range(2, -1, -1)):
        total += c * integral(j)
    return float(total)
