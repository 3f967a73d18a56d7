import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergosq.constructions import indicator
from ergosq.dyadic import (
    DyadicInterval,
    cell,
    enumerate_dyadic,
    expectation,
    expectation_at,
    expectation_profile,
    window_level,
)
from ergosq.errors import ContractError
from ergosq.signal import GridSpec, make_signal
from oracles import block_means, random_step


@pytest.mark.parametrize("k, x, lo, hi", [
    (0, 0.6, 0.0, 1.0),
    (-1, 0.6, 0.5, 1.0),
    (3, -0.5, -8.0, 0.0),
])
def test_cell_examples(k, x, lo, hi):
    iv = cell(k, x)
    assert (iv.lo, iv.hi) == (lo, hi)


@given(st.integers(-20, 20), st.floats(-1e6, 1e6, allow_nan=False))
def test_cell_contains_point(k, x):
    assert cell(k, x).contains(x)


def test_children_and_nesting():
    iv = DyadicInterval(2, -3)
    a, b = iv.children()
    assert (a.k, a.m, b.m) == (1, -6, -5)
    assert a.parent() == iv and b.parent() == iv
    assert iv.contains_interval(a) and not a.contains_interval(iv)


@given(st.integers(-4, 4), st.integers(-20, 20), st.integers(-4, 4), st.integers(-20, 20))
def test_nested_or_disjoint(k1, m1, k2, m2):
    a, b = DyadicInterval(k1, m1), DyadicInterval(k2, m2)
    overlap = max(a.lo, b.lo) < min(a.hi, b.hi)
    assert overlap == (a.contains_interval(b) or b.contains_interval(a))


def _half_indicator(R=4):
    return indicator(GridSpec(-R, 0, 2 << R), 0.5, 1.0)


def test_expectation_halfline_regimes():
    f = _half_indicator()
    assert expectation(f, 0, 0.25) == 0.5
    assert expectation(f, 1, 0.6) == 0.25
    assert expectation(f, -2, 0.6) == 1.0
    for k in range(-1, 6):
        assert expectation(f, k, 0.51) == 2.0 ** (-k - 1)


def test_expectation_constant():
    f = make_signal(np.full(16, 2.5), GridSpec(-2, 0, 16))
    for k in (-2, -1, 0, 1, 2):
        assert expectation(f, k, 0.3) == 2.5


def test_expectation_below_grid_is_cell_value(rng):
    f = random_step(rng, 16, k_min=-1)
    x = f.grid.points()
    for k in (-1, -2, -5):
        assert np.array_equal([expectation(f, k, t) for t in x], f.values)
        assert np.array_equal(expectation_at(f, k, np.arange(16)), f.values)


def test_profile_examples(rng):
    f = random_step(rng, 40, k_min=-2, origin=-9)
    assert np.array_equal(expectation_profile(f, -2), f.values)
    g = random_step(rng, 40, k_min=-2, origin=0)
    big = 6  # [0, 64) covers the whole window
    assert np.all(expectation_profile(g, big) == g.prefix[-1] / 2.0**big)
    prof = expectation_profile(f, 1)
    np.testing.assert_array_equal(prof, block_means(f, 1))


@given(st.integers(0, 2**31), st.integers(1, 90), st.integers(-40, 40), st.integers(-3, 2))
def test_profile_matches_block_means(seed, n, origin, k_min):
    f = random_step(np.random.default_rng(seed), n, k_min=k_min, origin=origin)
    for k in range(k_min, k_min + 9):
        np.testing.assert_array_equal(expectation_profile(f, k), block_means(f, k))
        x = f.grid.points()
        pointwise = [expectation(f, k, t) for t in x[:: max(1, n // 7)]]
        np.testing.assert_array_equal(pointwise, block_means(f, k)[:: max(1, n // 7)])


@given(st.integers(0, 2**31), st.integers(0, 4), st.integers(1, 6), st.integers(-5, 5))
def test_tower_property(seed, s, q, r):
    # the window is a union of level-(k_min + s) atoms, so E_k f is a grid signal for k <= k_min + s
    B = 1 << s
    f = random_step(np.random.default_rng(seed), B * q, k_min=-2, origin=B * r)
    for k, j in itertools.combinations_with_replacement(range(-2, 6), 2):
        if k > -2 + s:
            continue
        inner = f.with_values(expectation_profile(f, k))
        np.testing.assert_array_equal(expectation_profile(inner, j), expectation_profile(f, j))


@given(st.integers(0, 2**31), st.integers(1, 80))
def test_contraction(seed, n):
    f = random_step(np.random.default_rng(seed), n, k_min=0, dyadic=False)
    for k in range(0, 9):
        assert np.max(np.abs(expectation_profile(f, k))) <= f.sup_norm


@given(st.integers(0, 2**31), st.integers(-8, 8), st.integers(-8, 8))
def test_linearity_exact(seed, a, b):
    r = np.random.default_rng(seed)
    f = random_step(r, 48, k_min=-1, origin=5)
    g = random_step(r, 48, k_min=-1, origin=5)
    alpha, beta = a / 4.0, b / 8.0
    comb = f.with_values(alpha * f.values + beta * g.values)
    for k in range(-1, 6):
        lhs = expectation_profile(comb, k)
        rhs = alpha * expectation_profile(f, k) + beta * expectation_profile(g, k)
        np.testing.assert_array_equal(lhs, rhs)


def _brute_enumerate(grid, k_lo, k_hi):
    out = set()
    for k in range(k_lo, k_hi + 1):
        side = 2.0**k
        for m in range(int(grid.lo / side) - 4, int(grid.hi / side) + 4):
            if max(m * side, grid.lo) < min((m + 1) * side, grid.hi):
                out.add(DyadicInterval(k, m))
    return out


def test_enumerate_examples():
    unit = GridSpec(-3, 0, 8)
    quarters_halves = enumerate_dyadic(unit, -2, -1)
    assert sum(iv.k == -2 for iv in quarters_halves) == 4
    assert sum(iv.k == -1 for iv in quarters_halves) == 2
    assert enumerate_dyadic(unit, 0, 0) == [DyadicInterval(0, 0)]
    sym = GridSpec(-1, -2, 4)  # [-1, 1)
    got = enumerate_dyadic(sym, -1, 1)
    assert set(got) == _brute_enumerate(sym, -1, 1)
    assert len(got) == len(set(got)) == 8
    assert {iv for iv in got if iv.k == 1} == {DyadicInterval(1, -1), DyadicInterval(1, 0)}


@given(st.integers(-3, 1), st.integers(-50, 50), st.integers(1, 60), st.integers(-4, 5),
       st.integers(0, 4))
def test_enumerate_matches_brute(k_min, origin, n, k_lo, span):
    grid = GridSpec(k_min, origin, n)
    got = enumerate_dyadic(grid, k_lo, k_lo + span)
    assert len(got) == len(set(got))
    assert set(got) == _brute_enumerate(grid, k_lo, k_lo + span)
    assert [iv.k for iv in got] == sorted(iv.k for iv in got)


def test_enumerate_empty_range():
    with pytest.raises(ContractError):
        enumerate_dyadic(GridSpec(0, 0, 4), 2, 1)


def test_interval_cells_and_window_level():
    g = GridSpec(-2, -3, 10)
    assert DyadicInterval(-1, -1).cells(g).tolist() == [1, 2]
    assert DyadicInterval(3, 0).cells(g).tolist() == list(range(3, 10))
    assert window_level(g) == 2
    with pytest.raises(ContractError):
        DyadicInterval(-3, 0).cells(g)
