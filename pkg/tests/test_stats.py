import math

import numpy as np
import pytest

from charpath.dirichlet import build_context
from charpath.paths import PathGrid, path_value
from charpath.stats import (
    CHAR_SCALE,
    LIMIT_SCALE,
    GridMismatch,
    TailCurve,
    ecdf_distance,
    finite_dim_compare,
    increment_moment,
    increment_report,
    multi_indices,
    phi_limit,
    phi_q,
    tail_envelope,
    tau_grid,
    trivial_increment_bound,
)


def test_constants():
    gamma = 0.57721566490153286
    assert CHAR_SCALE == math.exp(gamma) / math.pi
    assert LIMIT_SCALE == 2 * math.exp(gamma)


def test_tau_grid():
    assert np.allclose(tau_grid("0.25:2.0:8"), np.arange(1, 9) * 0.25)
    assert tau_grid("1:1:1").tolist() == [1.0]
    for bad in ("1:2", "a:b:c", "0:1:0"):
        with pytest.raises(ValueError):
            tau_grid(bad)


@pytest.mark.parametrize("q", [101, 1009])
def test_phi_q_shape(q):
    ctx = build_context(q)
    curve = phi_q(ctx, np.linspace(0, 3, 31))
    assert curve.probs[0] == 1
    assert np.all(np.diff(curve.probs) <= 0)
    assert curve.meta["principal"] == "excluded"
    assert curve.meta["characters"] == q - 2


def test_phi_q_large_tau(ctx101):
    assert phi_q(ctx101, [1000.0]).probs[0] == 0


def test_phi_q_brute(ctx101):
    # oracle: maxima from per-character vertex values
    grid = PathGrid.vertex(101)
    taus = [0.5, 1.0, 1.5]
    maxima = []
    for j in range(1, 100, 2):
        chi = ctx101.character(j)
        maxima.append(max(abs(path_value(chi, f)) for f in grid.fractions))
    maxima = np.array(maxima)
    want = [(maxima > CHAR_SCALE * t).mean() for t in taus]
    assert np.allclose(phi_q(ctx101, taus, "odd").probs, want)


def test_phi_limit():
    taus = [0.0, 1.0, 2.0]
    a = phi_limit(taus, 400, N=2000, grid=512, seed=3)
    b = phi_limit(taus, 400, N=2000, grid=512, seed=3, threads=2)
    assert np.array_equal(a.probs, b.probs) and np.array_equal(a.stderr, b.stderr)
    assert a.probs[0] == 1
    assert np.all(np.diff(a.probs) <= 0)
    assert np.allclose(a.stderr, np.sqrt(a.probs * (1 - a.probs) / 400))


def test_phi_limit_envelope():
    curve = phi_limit([2.0], 10_000, N=10_000, grid=4096, parity="minus", seed=5)
    assert curve.probs[0] <= 3 * tail_envelope(2.0)


def test_ecdf_distance():
    taus = np.array([0.5, 1.0])
    a = TailCurve(taus, np.array([0.9, 0.4]), "a")
    b = TailCurve(taus, np.array([0.8, 0.3]), "b")
    assert ecdf_distance(a, a) == 0
    assert abs(ecdf_distance(a, b) - 0.1) < 1e-15
    with pytest.raises(GridMismatch):
        ecdf_distance(a, TailCurve(np.array([0.5, 1.5]), b.probs, "c"))


def test_increment_moment(ctx101):
    assert increment_moment(ctx101, 0.3, 0.3) == 0
    v = increment_moment(ctx101, 0.2, 0.7)
    assert 0 <= v <= 101**2 * 0.5**4
    assert increment_moment(ctx101, 0.7, 0.2) == v
    with pytest.raises(ValueError):
        increment_moment(ctx101, 0.1, 0.2, order=3)


def test_trivial_bound_random():
    rng = np.random.default_rng(4)
    contexts = {q: build_context(q) for q in (5, 7, 101, 1009)}
    for _ in range(1000):
        q = int(rng.choice(list(contexts)))
        s, t = sorted(rng.random(2))
        order = int(rng.choice([2, 4]))
        assert increment_moment(contexts[q], s, t, order) <= trivial_increment_bound(q, s, t, order) + 1e-12


def test_increment_report(ctx1009):
    rep = increment_report(ctx1009)
    assert len(rep.pairs) == 6 and np.all(rep.fourth_moments >= 0)
    assert rep.slope >= 1.5


def test_multi_indices():
    assert multi_indices(1, 2) == [((1,), (1,)), ((2,), (2,))]
    assert len(multi_indices(2, 2)) == 4 + 9


def test_finite_dim_compare(ctx101, ctx10007):
    rows = finite_dim_compare(ctx101, [0.0], D=2)
    assert all(r.character == 0 and r.limit == 0 for r in rows)
    (row,) = finite_dim_compare(ctx10007, [0.5], D=1)
    assert abs(row.limit - 0.5) < 1e-3 and row.discrepancy <= 0.05
    rows = finite_dim_compare(ctx101, [0.25, 0.5], D=2, samples=200, terms=500)
    table = {(r.n, r.m): r for r in rows}
    for (n, m), r in table.items():
        assert abs(r.character - table[(m, n)].character.conjugate()) < 1e-12
        assert r.montecarlo is not None
    with pytest.raises(ValueError):
        finite_dim_compare(ctx101, [0.5], D=4)
