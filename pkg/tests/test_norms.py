import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergosq.constructions import indicator
from ergosq.dyadic import DyadicInterval, enumerate_dyadic, window_level
from ergosq.errors import ContractError
from ergosq.norms import (
    bmo_dyadic,
    certifiable_intervals,
    certify_sweep,
    lower_median,
    lp_norm,
    mean_oscillation,
    theorem2_certificate,
)
from ergosq.signal import GridSpec, make_signal
from ergosq.sqfn import ScaleRange, s_sup
from oracles import compact_step

grids = st.builds(lambda k, o, n: GridSpec(k, o, n),
                  st.integers(-3, 1), st.integers(-40, 40), st.integers(1, 64))


def _values(seed, n, dyadic=True):
    r = np.random.default_rng(seed)
    return r.integers(-64, 65, size=n) / 64.0 if dyadic else r.standard_normal(n)


def test_bmo_constant_is_zero():
    g = GridSpec(-2, 3, 24)
    v, rep = bmo_dyadic(np.full(24, 7.0), g)
    assert v == 0.0 and rep.mean_oscillation == 0.0


def test_half_indicator_oscillation():
    g = GridSpec(-3, 0, 8)
    vals = np.r_[np.ones(4), np.zeros(4)]
    rep = mean_oscillation(vals, g, DyadicInterval(0, 0))
    assert rep.mean_oscillation == 0.5 and rep.sample_count == 8
    assert rep.minimizer == 0.0  # lower median
    flipped = mean_oscillation(1.0 - vals, g, DyadicInterval(0, 0))
    assert flipped.mean_oscillation == 0.5


def _brute_bmo(vals, grid):
    best = 0.0
    for iv in enumerate_dyadic(grid, grid.k_min, window_level(grid) + 1):
        sub = vals[iv.cells(grid)]
        best = max(best, min(float(np.mean(np.abs(sub - a))) for a in sub))
    return best


@given(grids, st.integers(0, 2**31), st.booleans())
def test_bmo_matches_brute_inf_over_data_values(grid, seed, dyadic):
    vals = _values(seed, grid.cell_count, dyadic)
    v, rep = bmo_dyadic(vals, grid)
    assert v == pytest.approx(_brute_bmo(vals, grid), rel=1e-12, abs=1e-15)
    again = mean_oscillation(vals, grid, rep.interval)
    assert again.mean_oscillation == pytest.approx(v, rel=1e-12, abs=1e-15)


@given(grids, st.integers(0, 2**31), st.floats(-10, 10, allow_nan=False))
def test_median_is_optimal(grid, seed, b):
    vals = _values(seed, grid.cell_count, False)
    for iv in enumerate_dyadic(grid, grid.k_min, window_level(grid))[::5]:
        rep = mean_oscillation(vals, grid, iv)
        sub = vals[iv.cells(grid)]
        assert rep.mean_oscillation <= np.mean(np.abs(sub - b)) + 1e-12


@given(grids, st.integers(0, 2**31), st.integers(-64, 64), st.integers(-5, 5))
def test_bmo_invariances(grid, seed, c, e):
    vals = _values(seed, grid.cell_count)
    base, _ = bmo_dyadic(vals, grid)
    shifted, _ = bmo_dyadic(vals + c / 8.0, grid)
    assert shifted == base
    for lam in (2.0**e, -(2.0**e)):
        scaled, _ = bmo_dyadic(lam * vals, grid)
        assert scaled == abs(lam) * base
    assert base <= 2 * np.max(np.abs(vals))


@given(grids, st.integers(0, 2**31), st.floats(0.1, 30))
def test_bmo_general_scaling(grid, seed, lam):
    vals = _values(seed, grid.cell_count, False)
    base, _ = bmo_dyadic(vals, grid)
    assert bmo_dyadic(lam * vals, grid)[0] == pytest.approx(lam * base, rel=1e-12, abs=1e-300)
    assert base <= 2 * np.max(np.abs(vals))


def test_bmo_errors():
    g = GridSpec(0, 0, 4)
    with pytest.raises(ContractError):
        bmo_dyadic(np.zeros(3), g)
    with pytest.raises(ContractError):
        bmo_dyadic(np.zeros(4), g, 3, 1)


def test_lower_median():
    assert lower_median([3, 1, 2, 4]) == 2
    assert lower_median([5]) == 5


def test_lp_norm_examples():
    g = GridSpec(-3, 0, 10)
    one = np.zeros(10)
    one[4] = 1.0
    for p in (1, 2, 3.5, 8):
        assert lp_norm(one, g, p) == pytest.approx(2.0 ** (-3 / p), rel=1e-15)
        assert lp_norm(np.full(10, -2.0), g, p) == pytest.approx(2 * (10 / 8) ** (1 / p), rel=1e-15)
    with pytest.raises(ContractError):
        lp_norm(one, g, 0.5)


@given(grids, st.integers(0, 2**31))
def test_lp2_matches_cellwise_sum(grid, seed):
    vals = _values(seed, grid.cell_count, False)
    ref = math.sqrt(sum(v * v * grid.h for v in vals))
    assert lp_norm(vals, grid, 2) == pytest.approx(ref, rel=1e-13)


# ---------------------------------------------------------------------------
# certificate

def test_certificate_far_support():
    g = GridSpec(-3, 0, 64)
    v = np.zeros(64)
    v[60:] = 1.0  # [7.5, 8) is far from I* of I = [2, 3)
    f = make_signal(v, g)
    iv = DyadicInterval(0, 2)
    cert = theorem2_certificate(f, iv, ScaleRange(-3, 12))
    assert cert.passed
    assert cert.term1 == 0.0
    sf = s_sup(f, ScaleRange(-3, 12), cells=[g.cell_of(cert.center_point)]).values[0]
    assert cert.a_I == sf
    assert cert.enlarged == (1.0, 4.0)


def test_certificate_half_indicator():
    g = GridSpec(-6, 0, 128)  # [0, 2)
    f = indicator(g, 0.5, 1.0)
    cert = theorem2_certificate(f, DyadicInterval(-4, 8), ScaleRange(-6, 14))  # [1/2, 9/16)
    assert cert.passed, cert.failures()
    assert cert.small_scale_residual == 0.0
    names = {q.name: q for q in cert.inequalities}
    assert names["small_scale_residual"].passed
    assert names["translation_bound"].passed
    assert names["expectation_match"].lhs == 0.0
    assert cert.geometric_tail == 2.0
    doc = json.loads(cert.to_json())
    for q in doc["inequalities"]:
        assert set(q) == {"name", "lhs", "rhs", "slack", "pass"}
    assert doc["pass"] is True


@pytest.mark.parametrize("j", [-5, 0, 3, 10])
def test_geometric_tail_is_two(j):
    assert sum(2.0**j * 2.0**-k for k in range(j, j + 200)) == pytest.approx(2.0)
    g = GridSpec(j - 2, -8, 16)
    f = make_signal(np.ones(16), g)
    cert = theorem2_certificate(f, DyadicInterval(j, -1), ScaleRange(j - 2, j + 10))
    assert cert.geometric_tail == 2.0


def test_certificate_window_errors():
    f = make_signal(np.ones(16), GridSpec(0, 0, 16))
    with pytest.raises(ContractError):
        theorem2_certificate(f, DyadicInterval(2, 0), ScaleRange(0, 8))  # I* leaves the window
    with pytest.raises(ContractError):
        theorem2_certificate(f, DyadicInterval(2, 7), ScaleRange(0, 8))  # I outside
    ivs = certifiable_intervals(f.grid)
    assert DyadicInterval(2, 1) in ivs and DyadicInterval(2, 0) not in ivs


@given(st.integers(0, 2**31))
def test_certificates_on_random_steps(seed):
    f = compact_step(np.random.default_rng(seed), n=32, k_min=-3)
    for cert in certify_sweep(f, ScaleRange(-3, 17)):
        assert cert.passed, (cert.interval, cert.failures())
        assert cert.small_scale_residual == 0.0
        assert cert.mean_oscillation <= cert.term1 + cert.term2 + 1e-12
