import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charpath.dirichlet import build_context
from charpath.moments import (
    M_limit,
    M_limit_single_loop,
    MomentSpec,
    Mq_direct,
    Mq_fourier,
    Mq_full,
    Mq_sigma,
    ParityMismatch,
    TooLarge,
    beta,
    beta_array,
    calB,
    calB_array,
    character_average_order0,
    divisor_dN,
    divisor_lemma_check,
    hyper_kloosterman,
    ramanujan_check,
    twisted_gauss_average,
    twisted_gauss_via_kloosterman,
    zeta,
)


def brute_dN(N, x):
    return sum(1 for ys in itertools.product(range(1, x + 1), repeat=N) if math.prod(ys) == x)


def brute_kloosterman(q, b):
    return sum(
        cmath.exp(2j * math.pi * (x + (b * pow(x, -1, q)) % q) / q) for x in range(1, q)
    )


def test_beta_examples():
    for t in (0.1, 0.25, 0.7):
        for N in (1, 2, 3):
            assert abs(beta(N, t, 1) - (1 - math.cos(2 * math.pi * t)) ** N) < 1e-14
    assert abs(beta(2, 0.25, 2) - 2) < 1e-14


def test_beta_bound():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        N, x, t = int(rng.integers(1, 4)), int(rng.integers(1, 400)), float(rng.random())
        cap = int(rng.choice([0, 5, 7, 11])) or None
        for parity in ("odd", "even"):
            assert abs(beta(N, t, x, cap, parity)) <= 2**N * divisor_dN(N, x) / x + 1e-12


def test_calB_examples_and_bound():
    assert calB([2], [0.3], 12) == beta(2, 0.3, 12)
    ts = [0.1, 0.35]
    want = (1 - math.cos(2 * math.pi * 0.1)) ** 2 * (1 - math.cos(2 * math.pi * 0.35))
    assert abs(calB([2, 1], ts, 1) - want) < 1e-14
    rng = np.random.default_rng(1)
    for _ in range(300):
        Ns = [int(v) for v in rng.integers(0, 3, size=2)]
        if sum(Ns) == 0:
            continue
        x = int(rng.integers(1, 300))
        b = calB(Ns, sorted(rng.random(2)), x)
        assert abs(b) <= 2 ** sum(Ns) * divisor_dN(sum(Ns), x) * divisor_dN(2, x) / x + 1e-12


@pytest.mark.parametrize("cap", [None, 7])
@pytest.mark.parametrize("parity", ["odd", "even"])
def test_array_matches_scalar(cap, parity):
    Ns, ts = (1, 2), (0.2, 0.45)
    arr = calB_array(Ns, ts, 300, parity, cap)
    for x in range(1, 301):
        assert abs(arr[x] - calB(Ns, ts, x, cap, parity)) < 1e-12
    b = beta_array(2, 0.3, 200, parity, cap)
    assert all(abs(b[x] - beta(2, 0.3, x, cap, parity)) < 1e-12 for x in range(1, 201))


def test_capped_vanishes_at_multiples():
    assert beta(2, 0.3, 14, cap=7) == 0
    assert calB([1, 1], [0.2, 0.4], 21, cap=7) == 0


def test_divisor_examples():
    assert divisor_dN(4, 60) == brute_dN(4, 60)
    assert divisor_lemma_check(6, 10, 2, 2)
    assert divisor_dN(2, 6) * divisor_dN(2, 10) <= divisor_dN(4, 60)
    for x in (1, 7, 36):
        assert divisor_lemma_check(1, x, 3, 2)
    for N in (1, 2, 3):
        for x in range(1, 40):
            assert divisor_dN(N, x) == brute_dN(N, x)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**4), st.integers(1, 10**4), st.integers(1, 4), st.integers(1, 4))
def test_divisor_lemma_property(x1, x2, N1, N2):
    assert divisor_lemma_check(x1, x2, N1, N2)


def test_mq_direct_examples(ctx101, ctx1009, ctx10007):
    spec = MomentSpec((0.5,), (1,), (1,), "odd")
    res = Mq_direct(ctx10007, spec)
    assert 0.45 <= res.value.real <= 0.55 and res.q == 10007
    zero = MomentSpec((0.0,), (2,), (1,), "even")
    assert Mq_direct(ctx101, zero).value == 0
    off = MomentSpec((0.5,), (1,), (2,), "odd")
    assert abs(Mq_direct(ctx1009, off).value) < abs(Mq_direct(ctx101, off).value)


def test_mq_direct_conjugate_symmetry(ctx101):
    spec = MomentSpec((0.2, 0.6), (1, 1), (2, 0), "even")
    a = Mq_direct(ctx101, spec).value
    b = Mq_direct(ctx101, spec.swapped()).value
    assert abs(a - b.conjugate()) < 1e-14


def test_threads_do_not_change_result(ctx1009):
    spec = MomentSpec((0.3, 0.7), (1, 0), (0, 1), "odd")
    assert Mq_direct(ctx1009, spec, threads=1).value == Mq_direct(ctx1009, spec, threads=4).value


def test_mq_sigma(ctx101):
    spec = MomentSpec((0.5,), (1,), (1,), "odd")
    sig = Mq_sigma(ctx101, spec)
    direct = Mq_direct(ctx101, spec)
    assert abs(sig.value - direct.value) <= 5 * sig.error_estimate
    assert Mq_sigma(101, MomentSpec((0.0,), (1,), (1,), "odd")).value == 0
    with pytest.raises(ParityMismatch):
        Mq_sigma(101, MomentSpec((0.5,), (1,), (2,), "odd"))


@pytest.mark.parametrize("q", [5, 7, 11])
@pytest.mark.parametrize(
    "spec",
    [
        MomentSpec((0.3,), (1,), (1,), "odd"),
        MomentSpec((0.3,), (1,), (1,), "even"),
        MomentSpec((0.2, 0.6), (1, 0), (0, 2), "odd"),
        MomentSpec((0.45,), (2,), (1,), "even"),
    ],
)
def test_full_formula_equals_fourier_average(q, spec):
    ctx = build_context(q)
    assert abs(Mq_full(ctx, spec).value - Mq_fourier(ctx, spec).value) < 1e-10


def test_full_formula_guard(ctx101):
    with pytest.raises(TooLarge):
        Mq_full(ctx101, MomentSpec((0.5,), (1,), (1,)))


def test_m_limit():
    spec = MomentSpec((0.5,), (1,), (1,), "odd")
    res = M_limit(spec, 100_000)
    assert abs(res.value - 0.5) <= 1e-3
    assert abs(res.value - M_limit_single_loop(0.5, 100_000)) < 1e-10
    assert M_limit(MomentSpec((0.5,), (1,), (2,)), 1000).value == 0
    quarter = MomentSpec((0.25,), (1,), (1,))
    assert abs(M_limit(quarter, 100_000).value - M_limit(quarter, 200_000).value) <= 1e-4
    assert M_limit(MomentSpec((0.0,), (1,), (1,)), 1000).value == 0


def test_m_limit_even_quarter():
    # sum sin^2(pi k / 2) / k^2 / pi^2 = 1/8
    spec = MomentSpec((0.25,), (1,), (1,), "even")
    assert abs(M_limit(spec, 100_000).value - 0.125) < 1e-5


def test_spec_validation():
    with pytest.raises(ValueError):
        MomentSpec((0.5, 0.2), (1, 1), (1, 1))
    with pytest.raises(ValueError):
        MomentSpec((0.5,), (0,), (0,))
    with pytest.raises(ValueError):
        MomentSpec((0.5,), (1, 1), (1,))


def test_kloosterman_examples():
    for b in (1, 3, 6):
        assert abs(hyper_kloosterman(7, 1, b) - cmath.exp(2j * math.pi * b / 7)) < 1e-14
    want = 2 * math.cos(4 * math.pi / 7) + 4 * math.cos(2 * math.pi / 7)
    assert abs(hyper_kloosterman(7, 2, 1) - want) < 1e-12
    for q in (7, 11, 13):
        for b in range(1, q):
            hk = hyper_kloosterman(q, 2, b)
            assert abs(hk - brute_kloosterman(q, b)) < 1e-12
            assert abs(hk) <= 2 * math.sqrt(q)


def test_twisted_average(ctx7):
    for a in range(1, 7):
        for parity in ("odd", "even"):
            avg = twisted_gauss_average(ctx7, 2, a, parity)
            assert abs(avg) <= 2 * 2 * math.sqrt(7)
            assert abs(avg - twisted_gauss_via_kloosterman(7, 2, a, parity)) < 1e-8
    odd = twisted_gauss_average(ctx7, 2, 1, "odd")
    assert abs(odd - (hyper_kloosterman(7, 2, 1) - hyper_kloosterman(7, 2, 6))) < 1e-8


@pytest.mark.parametrize("q", [7, 11, 13])
def test_order_zero_average(q):
    ctx = build_context(q)
    for a in range(1, q):
        for parity, sigma in (("odd", -1), ("even", 1)):
            want = (a == 1) + sigma * (a == q - 1)
            assert abs(character_average_order0(ctx, a, parity) - want) < 1e-12
            assert abs(twisted_gauss_average(ctx, 0, a, parity) - want) < 1e-12


def test_zeta_and_ramanujan():
    assert abs(zeta(2) - math.pi**2 / 6) < 1e-14
    assert abs(zeta(4) - math.pi**4 / 90) < 1e-14
    assert abs(zeta(3) - 1.2020569031595942) < 1e-14
    _, rhs = ramanujan_check(2, 10)
    assert abs(rhs - 5 * math.pi**4 / 72) < 1e-12
    partial, rhs = ramanujan_check(3, 100_000)
    assert abs(partial - rhs) <= 1e-6
    with pytest.raises(ValueError):
        zeta(1)
