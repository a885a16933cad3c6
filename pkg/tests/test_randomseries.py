import cmath
import math

import numpy as np
import pytest

from charpath.paths import PathGrid
from charpath.randomseries import (
    SeriesSpec,
    Truncation,
    ensemble_at,
    eval_F_general,
    eval_F_minus,
    eval_F_plus,
    index_mask,
    rough_norm,
    sample_ensemble,
    series_values_for,
    smooth_truncation_eval,
)
from charpath.steinhaus import SeedSpec, SteinhausSampler


@pytest.fixture(scope="module")
def sampler():
    return SteinhausSampler(SeedSpec(31, 2), 20_000)


def loop_minus(s, eta, t, ks):
    """Scalar oracle (eta/pi) sum X_k/k (1 - cos 2 pi k t) over the listed k."""
    return eta / math.pi * sum(s.value(k) / k * (1 - math.cos(2 * math.pi * k * t)) for k in ks)


def test_plus_zeros(sampler):
    eta = sampler.eta()
    for N in (1, 10, 10_000):
        assert eval_F_plus(sampler, eta, 0.5, N) == 0
        assert eval_F_plus(sampler, eta, 0.0, N) == 0
    assert eval_F_minus(sampler, eta, 0.0, 100) == 0
    assert eval_F_general(sampler, eta, 0.0, 100) == 0


def test_minus_matches_loop(sampler):
    eta = sampler.eta()
    assert abs(eval_F_minus(sampler, eta, 0.3, 100) - loop_minus(sampler, eta, 0.3, range(1, 101))) < 1e-12


def test_general_pairs_to_parity_forms(sampler):
    eta = sampler.eta()
    minus = sampler.fix_sign(-1)
    plus = sampler.fix_sign(1)
    assert abs(eval_F_general(minus, eta, 0.3, 100) - eval_F_minus(sampler, eta, 0.3, 100)) < 1e-10
    assert abs(eval_F_general(plus, eta, 0.3, 100) + 1j * eval_F_plus(sampler, eta, 0.3, 100)) < 1e-10


def test_general_matches_loop(sampler):
    # (eta / 2 pi) sum_{0 < |k| <= N} X_k / k (1 - e(kt)), with X_{-k} = X_{-1} X_k
    eta, t, N = sampler.eta(), 0.41, 60
    total = 0
    for k in range(1, N + 1):
        for kk in (k, -k):
            total += sampler.value(kk) / kk * (1 - cmath.exp(2j * math.pi * kk * t))
    assert abs(eval_F_general(sampler, eta, t, N) - eta / (2 * math.pi) * total) < 1e-12


def test_smooth_truncation(sampler):
    eta = sampler.eta()
    got = smooth_truncation_eval(sampler, eta, 0.3, 2, 10)
    assert abs(got - loop_minus(sampler, eta, 0.3, [1, 2, 4, 8])) < 1e-12
    got3 = smooth_truncation_eval(sampler, eta, 0.3, 3, 10)
    assert abs(got3 - loop_minus(sampler, eta, 0.3, [1, 2, 3, 4, 6, 8, 9])) < 1e-12
    full = smooth_truncation_eval(sampler, eta, 0.3, 50, 50)
    assert abs(full - eval_F_minus(sampler, eta, 0.3, 50)) < 1e-12
    assert np.nonzero(index_mask(Truncation.smooth(3, 10)))[0].tolist() == [1, 2, 3, 4, 6, 8, 9]


def test_rough_norm(sampler):
    grid = PathGrid.uniform(512)
    assert rough_norm(sampler, 1000, 1000, grid) == 0
    assert rough_norm(sampler, 10, 10_000, grid) > rough_norm(sampler, 5000, 10_000, grid)


@pytest.mark.parametrize("parity", ["plus", "minus", "general"])
def test_fft_grid_matches_direct(sampler, parity):
    uni = PathGrid.uniform(65)
    custom = PathGrid.of(list(uni.points))
    eta = sampler.eta()
    a = series_values_for(sampler, eta, SeriesSpec(parity, Truncation.symmetric(3000), uni))
    b = series_values_for(sampler, eta, SeriesSpec(parity, Truncation.symmetric(3000), custom))
    assert np.abs(a - b).max() < 1e-10


def test_ensemble_determinism():
    spec = SeriesSpec("general", Truncation.symmetric(500), PathGrid.uniform(33))
    a = sample_ensemble(spec, 70, 5)
    b = sample_ensemble(spec, 70, 5, threads=3)
    assert all(np.array_equal(x.values, y.values) and x.eta == y.eta for x, y in zip(a, b))
    assert [x.seed_spec.stream for x in a] == list(range(70))


def test_ensemble_sample_matches_sampler():
    spec = SeriesSpec("minus", Truncation.symmetric(400), PathGrid.uniform(17))
    sample = sample_ensemble(spec, 3, 8)[2]
    s = SteinhausSampler(SeedSpec(8, 2), 400)
    want = [eval_F_minus(s, s.eta(), t, 400) for t in spec.grid.points]
    assert np.allclose(sample.values, want, atol=1e-12)


def test_eta_symmetry():
    spec = SeriesSpec("minus", Truncation.symmetric(1000), PathGrid.of([0.5]))
    vals = np.array([s.values[0] for s in sample_ensemble(spec, 10_000, 12)])
    assert abs(vals.mean()) <= 0.03


def test_mean_at_point():
    vals = ensemble_at("minus", 0.3, 2000, 10_000, base_seed=13)
    assert abs(vals.mean()) <= 0.03


def test_fixed_eta():
    spec = SeriesSpec("plus", Truncation.symmetric(100), PathGrid.uniform(9), eta=1j)
    assert all(s.eta == 1j for s in sample_ensemble(spec, 3, 0))
    with pytest.raises(ValueError):
        SeriesSpec("plus", eta=2.0)


def test_truncation_validation():
    with pytest.raises(ValueError):
        Truncation.symmetric(0)
    with pytest.raises(ValueError):
        Truncation.smooth(1, 10)
    with pytest.raises(ValueError):
        sample_ensemble(SeriesSpec(), 0, 0)
