import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charpath.dirichlet import PrincipalCharacter, build_context
from charpath.paths import (
    PathGrid,
    family_max_abs,
    family_path_values,
    fourier_path,
    max_abs_sum,
    parse_t,
    partial_sum,
    path_value,
    sample_path,
    split_qt,
)

R5 = 1 / math.sqrt(5)


def oracle_path(chi, t):
    """Plain loop: S(t) plus the linear piece of the next step."""
    q = chi.q
    x = Fraction(t) * q
    m = math.floor(x)
    s = sum(chi(n) for n in range(1, m + 1))
    return (s + float(x - m) * chi(m + 1)) / math.sqrt(q)


def test_partial_sum_examples(ctx5):
    chi = ctx5.character(1)
    assert abs(partial_sum(chi, 1)) < 1e-15
    assert abs(partial_sum(chi, Fraction(1, 5)) - R5) < 1e-15
    assert abs(partial_sum(chi, Fraction(2, 5)) - (1 + 1j) * R5) < 1e-15


def test_path_value_examples(ctx5):
    chi = ctx5.character(1)
    assert abs(path_value(chi, 0.1) - 0.5 * R5) < 1e-15
    assert path_value(chi, 0) == 0
    assert path_value(chi, 1) == 0
    assert path_value(chi, Fraction(1, 1)) == 0


def test_vertex_sample(ctx5, ctx7):
    p = sample_path(ctx5.character(1), PathGrid.vertex(5))
    assert len(p.values) == 6
    assert p.values[0] == 0 and p.values[-1] == 0
    p0 = sample_path(ctx7.character(0), PathGrid.vertex(7))
    assert abs(p0.values[-1] - 6 / math.sqrt(7)) < 1e-14


def test_uniform_within_one_step(ctx5):
    chi = ctx5.character(1)
    grid = PathGrid.uniform(11)
    vals = sample_path(chi, grid).values
    for t, v in zip(grid.points, vals):
        assert abs(v - partial_sum(chi, t)) <= R5 + 1e-15


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([5, 7, 11, 13, 101]), st.data())
def test_path_matches_oracle(q, data):
    ctx = build_context(q)
    chi = ctx.character(data.draw(st.integers(0, q - 2)))
    t = Fraction(data.draw(st.integers(0, 4 * q)), 4 * q)
    assert abs(path_value(chi, t) - oracle_path(chi, t)) < 1e-12


def test_family_values_agree(ctx101):
    grid = PathGrid.of([0.0, 0.13, 0.5, 0.77, 1.0])
    vals = family_path_values(ctx101, [1, 2, 50], grid, threads=2)
    for row, j in zip(vals, [1, 2, 50]):
        chi = ctx101.character(j)
        assert np.allclose(row, [path_value(chi, float(t)) for t in grid.points], atol=1e-13)


def test_split_qt():
    assert split_qt(5, Fraction(2, 5)) == (2, 0.0)
    assert split_qt(10007, 3 / 10007) == (3, 0.0)  # float snaps to the vertex
    whole, frac = split_qt(5, 0.1)
    assert whole == 0 and abs(frac - 0.5) < 1e-15
    assert parse_t("3/7") == Fraction(3, 7)
    assert parse_t("0.25") == 0.25


def test_grid_validation():
    with pytest.raises(ValueError):
        PathGrid.of([0.5, 0.2])
    with pytest.raises(ValueError):
        PathGrid.of([0.0, 1.5])
    with pytest.raises(ValueError):
        PathGrid.uniform(1)


def test_max_abs_examples(ctx5, ctx101):
    assert abs(max_abs_sum(ctx5.character(1)) - math.sqrt(2) * R5) < 1e-15
    assert abs(max_abs_sum(ctx5.character(0)) - 4 * R5) < 1e-15
    maxima = family_max_abs(ctx101, np.arange(1, 100))
    assert np.all(maxima >= 1 / math.sqrt(101) - 1e-15)


def test_fourier_examples(ctx5, ctx1009):
    assert fourier_path(ctx5.character(1), 0, 2) == 0
    assert abs(fourier_path(ctx5.character(2), 0.5, 4, form="parity")) < 1e-12
    with pytest.raises(PrincipalCharacter):
        fourier_path(ctx5.character(0), 0.3)
    with pytest.raises(ValueError):
        fourier_path(ctx5.character(1), 0.3, K=5)
    bound = 10 * math.log(1009) / math.sqrt(1009)
    for j in (1, 2, 500, 1007):
        chi = ctx1009.character(j)
        for t in np.arange(1, 10) / 10:
            assert abs(fourier_path(chi, t) - path_value(chi, t)) <= bound


@pytest.mark.parametrize("j", [1, 2, 3, 4, 57, 99])
def test_fourier_forms_agree(ctx101, j):
    chi = ctx101.character(j)
    for t in (0.1, 0.37, 0.5, 0.9):
        assert abs(fourier_path(chi, t, form="general") - fourier_path(chi, t, form="parity")) < 1e-12


def test_fourier_close_at_q101(ctx101):
    # the truncation error is O(log q / sqrt q); at q = 101 it is well inside 1
    chi = ctx101.character(7)
    for t in (0.2, 0.45, 0.8):
        assert abs(fourier_path(chi, t) - path_value(chi, t)) < 1.0
