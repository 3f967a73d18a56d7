"""Search for interval selectors that make ``S_I f`` oscillate as much as possible.

``S_I f(x)`` depends only on the offsets chosen at ``x``, and every value
between the pointwise extremes ``lo(x) = s_inf`` and ``hi(x) = s_sup`` is
bounded by them.  On one interval the mean oscillation about the median is

    (sum of the top half of the values - sum of the bottom half) / n,

which is the largest ``sum_U g - sum_L g`` over disjoint halves ``U, L``.
Raising ``g`` on ``U`` and lowering it on ``L`` only helps, so the optimum
puts ``hi`` on ``U`` and ``lo`` on ``L``: for even ``n`` that is
``-sum(lo) + sum_U (hi + lo)``, maximised by taking ``U`` as the points with
the largest ``hi + lo``.  Odd ``n`` leaves one point out, tried in turn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dyadic import DyadicInterval, block_size, enumerate_dyadic, expectation_at, window_level
from .errors import ContractError
from .moving import extrema
from .norms import lower_median
from .selector import TabulatedSelector
from .signal import INTEGER, Signal
from .sqfn import ScaleRange, check_range, default_range, s_inf, s_selector, s_sup

REALIZE_ATOL = 1e-8


@dataclass(frozen=True, eq=False)
class Envelope:
    signal: Signal
    scales: ScaleRange
    hi: np.ndarray
    lo: np.ndarray


def envelope(signal: Signal, scales: ScaleRange | None = None, workers: int = 1) -> Envelope:
    scales = scales or default_range(signal)
    hi = s_sup(signal, scales, workers=workers).values
    lo = s_inf(signal, scales, workers=workers).values
    return Envelope(signal, scales, hi, lo)


def oscillation_of(values) -> float:
    """Mean absolute deviation from the lower median."""
    values = np.asarray(values, dtype=float)
    return float(np.mean(np.abs(values - lower_median(values))))


def best_assignment(hi, lo) -> tuple[np.ndarray, float]:
    """Exact best choice of ``hi``/``lo`` per point (``True`` = hi)."""
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    n = hi.size
    if n == 0:
        raise ContractError("cannot assign an empty set of points")
    s = hi + lo
    order = np.argsort(-s, kind="stable")
    assign = np.zeros(n, dtype=bool)
    half = n // 2
    if n % 2 == 0:
        assign[order[:half]] = True
    else:
        ranked = s[order]
        top = np.concatenate([[0.0], np.cumsum(ranked)])
        rank = np.arange(n)
        # best top-half sum once the point at each rank is left out
        topsum = np.where(rank >= half, top[half], top[half + 1] - ranked)
        gain = lo[order] + topsum
        r = int(np.argmax(gain))
        keep = np.delete(order, r)
        assign[keep[:half]] = True
    return assign, oscillation_of(np.where(assign, hi, lo))


def random_baseline(hi, lo, trials: int = 256, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    best = 0.0
    for _ in range(trials):
        pick = rng.random(hi.size) < 0.5
        best = max(best, oscillation_of(np.where(pick, hi, lo)))
    return best


def best_oscillation(env: Envelope, interval: DyadicInterval) -> tuple[np.ndarray, float]:
    cells = interval.cells(env.signal.grid)
    if cells.size == 0:
        raise ContractError(f"interval {interval} does not meet the window")
    return best_assignment(env.hi[cells], env.lo[cells])


@dataclass(frozen=True, eq=False)
class AdversaryResult:
    selector: TabulatedSelector
    bound: float
    witness: DyadicInterval
    cells: np.ndarray
    assignment: np.ndarray
    target: np.ndarray
    realized: np.ndarray
    max_error: float
    baseline: float

    def report(self) -> dict:
        return {
            "bound": self.bound,
            "witness": {"k": self.witness.k, "m": self.witness.m,
                        "lo": self.witness.lo, "hi": self.witness.hi},
            "points": int(self.cells.size),
            "hi_points": int(np.count_nonzero(self.assignment)),
            "max_realization_error": self.max_error,
            "random_baseline": self.baseline,
        }


def _offsets_for(signal: Signal, k: int, cells, want_hi) -> np.ndarray:
    """Per-cell offsets at scale ``k`` realising the sup term (``want_hi``) or the inf term."""
    g = signal.grid
    N = block_size(g, k)
    ext = extrema(signal, k, cells)
    e = expectation_at(signal, k, cells)
    mx = np.ldexp(ext.max_sum, -k)
    mn = np.ldexp(ext.min_sum, -k)
    sup_off = np.where(mx - e >= e - mn, ext.argmax, ext.argmin)
    if g.mode == INTEGER:
        _, near = _kernels.nearest_scan(signal.prefix, signal.n, N,
                                        np.ascontiguousarray(cells), np.ldexp(e, k))
        inf_off = near * g.h
    else:
        inf_off = np.where(e > mx, ext.argmax, ext.argmin)
        inside = (e >= mn) & (e <= mx)
        if np.any(inside):
            c_in = np.ascontiguousarray(cells[inside])

            def bp(off):
                au = off / g.h
                return np.where(au == 0, 0, np.where(au == N, N + 1,
                                                     np.floor(au + 0.5))).astype(np.int64)

            a_u = _kernels.crossing_offsets(
                signal.prefix, signal.n, N, c_in, np.ldexp(e[inside], k),
                bp(ext.argmin[inside]), bp(ext.argmax[inside]),
            )
            inf_off[inside] = a_u * g.h
    return np.where(want_hi, sup_off, inf_off)


def candidate_intervals(signal: Signal, window=None) -> list[DyadicInterval]:
    g = signal.grid
    ivs = enumerate_dyadic(g, g.k_min, window_level(g) + 1)
    if window is not None:
        lo, hi = window
        ivs = [iv for iv in ivs if iv.lo >= lo and iv.hi <= hi]
    return ivs


def adversarial_bmo(signal: Signal, scales: ScaleRange | None = None, window=None,
                    seed: int = 0, workers: int = 1) -> AdversaryResult:
    """Tabulated selector whose square function has a large dyadic mean oscillation.

    ``window`` optionally restricts the candidate dyadic intervals to those
    inside ``[lo, hi)``.  The winning hi/lo profile is realised offset by
    offset and re-evaluated through :func:`s_selector`; any mismatch above
    ``1e-8`` raises.
    """
    scales = scales or default_range(signal)
    check_range(signal, scales)
    env = envelope(signal, scales, workers=workers)
    best = None
    for iv in candidate_intervals(signal, window):
        cells = iv.cells(signal.grid)
        if cells.size < 2:
            continue
        assign, value = best_assignment(env.hi[cells], env.lo[cells])
        if best is None or value > best[2]:
            best = (iv, assign, value, cells)
    if best is None:
        raise ContractError("no dyadic interval with at least two points to search")
    witness, assign, _, cells = best

    g = signal.grid
    table = {}
    for k in range(scales.k_lo, scales.k_hi + 1):
        row = np.full(g.cell_count, math.ldexp(1.0, k))
        row[cells] = _offsets_for(signal, k, cells, assign)
        table[k] = row
    sel = TabulatedSelector(g, (scales.k_lo, scales.k_hi), table)

    target = np.where(assign, env.hi[cells], env.lo[cells])
    realized = s_selector(signal, sel, scales, cells=cells, workers=workers).values
    err = float(np.max(np.abs(realized - target)))
    if not err <= REALIZE_ATOL:
        raise ContractError(f"selector realisation is off by {err:.3g} (> {REALIZE_ATOL})")
    baseline = random_baseline(env.hi[cells], env.lo[cells], seed=seed)
    return AdversaryResult(sel, oscillation_of(realized), witness, cells, assign,
                           target, realized, err, baseline)
