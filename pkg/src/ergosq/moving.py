"""Moving averages over dyadic-length intervals and their extrema over positions.

At scale ``k`` an admissible interval for the point ``x`` is
``[x - a, x - a + 2**k)`` with offset ``a`` in ``[0, 2**k]``.  The window
sum is continuous and piecewise linear in ``a`` on the real line, so its
extrema over the closed offset range are attained at breakpoints: the
grid-aligned windows containing the cell of ``x`` and the two endpoint
offsets.  On the integer line the offsets are the integers ``0..2**k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dyadic import block_size
from .errors import ContractError
from .signal import INTEGER, REAL, Signal


@dataclass(frozen=True)
class WindowExtrema:
    """Per-cell extremal window sums at scale ``k``.

    ``argmax``/``argmin`` are offsets (in the signal's length units) at
    which the extremes are attained.
    """

    k: int
    cells: np.ndarray
    max_sum: np.ndarray
    min_sum: np.ndarray
    argmax: np.ndarray
    argmin: np.ndarray


def moving_average(signal: Signal, lo: float, hi: float) -> float:
    """``2**-k`` times the integral over ``[lo, hi)``, where ``hi - lo == 2**k``.

    Endpoints computed in floating point may miss ``2**k`` by an ulp or so;
    lengths within a relative ``1e-12`` of a power of two are accepted.
    """
    length = hi - lo
    if not length > 0:
        raise ContractError(f"interval [{lo}, {hi}) has no length")
    k = round(math.log2(length))
    if abs(length - math.ldexp(1.0, k)) > 1e-12 * math.ldexp(1.0, k):
        raise ContractError(f"interval length {length} is not a power of two")
    g = signal.grid
    if g.mode == REAL:
        u = np.array([lo, hi]) / g.h - g.origin_index
        i = math.floor(u[0])
        if u[1] <= i + 1:
            # inside one cell the average is the cell value itself
            return float(signal.values[i]) if 0 <= i < g.cell_count else 0.0
    F = signal.cumulative(np.array([lo, hi]))
    return math.ldexp(float(F[1] - F[0]), -k)


def _real(signal: Signal) -> bool:
    return signal.grid.mode == REAL


def _as_offsets(signal, units):
    return np.asarray(units) * signal.grid.h


def window_extrema(signal: Signal, k: int) -> WindowExtrema:
    """Extremal window sums for every cell, via a monotone-deque sweep.

    Linear in ``cell_count`` per scale regardless of ``2**(k - k_min)``.
    """
    N = block_size(signal.grid, k)
    vmax, vmin, amax, amin = _kernels.extrema_deque(signal.prefix, signal.n, N, _real(signal))
    return WindowExtrema(
        k, np.arange(signal.n), vmax, vmin, _as_offsets(signal, amax), _as_offsets(signal, amin)
    )


def extrema_at(signal: Signal, k: int, cells) -> WindowExtrema:
    """Extremal window sums at selected cells by a direct walk (``O(n)`` per cell)."""
    N = block_size(signal.grid, k)
    cells = np.ascontiguousarray(cells, dtype=np.int64)
    vmax, vmin, amax, amin = _kernels.extrema_scan(signal.prefix, signal.n, N, cells, _real(signal))
    return WindowExtrema(
        k, cells, vmax, vmin, _as_offsets(signal, amax), _as_offsets(signal, amin)
    )


def extrema(signal: Signal, k: int, cells=None) -> WindowExtrema:
    if cells is None:
        return window_extrema(signal, k)
    cells = np.asarray(cells, dtype=np.int64)
    # the deque pass costs about as much as ~4 direct walks
    if cells.size > 4:
        full = window_extrema(signal, k)
        return WindowExtrema(
            k, cells, full.max_sum[cells], full.min_sum[cells],
            full.argmax[cells], full.argmin[cells],
        )
    return extrema_at(signal, k, cells)


def window_extrema_naive(signal: Signal, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Reference ``O(n * 2**(k - k_min))`` sweep over every breakpoint offset."""
    N = block_size(signal.grid, k)
    n = signal.n
    P = signal.prefix
    c = np.arange(n)

    def W(s):
        return np.take(P, s + N, mode="clip") - np.take(P, s, mode="clip")

    if _real(signal):
        first = 0.5 * (W(c) + W(c + 1))
        last = 0.5 * (W(c - N + 1) + W(c - N))
        hi = np.maximum(first, last)
        lo = np.minimum(first, last)
        shifts = range(N)
    else:
        hi = np.full(n, -np.inf)
        lo = np.full(n, np.inf)
        shifts = range(N + 1)
    for m in shifts:
        w = W(c - m)
        np.maximum(hi, w, out=hi)
        np.minimum(lo, w, out=lo)
    return hi, lo


def window_sums_at(signal: Signal, k: int, cells, offsets) -> np.ndarray:
    """Window sums over ``[x - a, x - a + 2**k)`` for each cell's point ``x``.

    Real line: linear interpolation between neighbouring breakpoints, clamped
    to the pair's range, so values at breakpoints are bit-identical to the
    extrema sweep and never stray outside the true range through rounding.
    Integer line: offsets must be integers.
    """
    g = signal.grid
    N = block_size(g, k)
    n = signal.n
    P = signal.prefix
    cells = np.asarray(cells, dtype=np.int64)
    au = np.asarray(offsets, dtype=float) / g.h
    if np.any(au < 0) or np.any(au > N):
        raise ContractError(f"offset outside [0, 2**{k}] at scale {k}")

    def W(s):
        return np.take(P, s + N, mode="clip") - np.take(P, s, mode="clip")

    if g.mode == INTEGER:
        if np.any(au != np.floor(au)):
            raise ContractError("integer-line offsets must be integers")
        return W(cells - au.astype(np.int64))

    # breakpoint b=0 at a=0, b=1..N at a=b-1/2, b=N+1 at a=N
    b0 = np.where(au <= 0.5, 0, np.where(au >= N - 0.5, N, np.floor(au + 0.5).astype(np.int64)))
    b0 = np.minimum(b0, N)
    left_a = np.where(b0 == 0, 0.0, b0 - 0.5)
    right_a = np.where(b0 == N, float(N), b0 + 0.5)
    e0 = 0.5 * (W(cells) + W(cells + 1))
    e1 = 0.5 * (W(cells - N + 1) + W(cells - N))
    left_v = np.where(b0 == 0, e0, W(cells - b0 + 1))
    right_v = np.where(b0 == N, e1, W(cells - b0))
    t = (au - left_a) / (right_a - left_a)
    near_left = t <= 0.5
    v = np.where(
        near_left,
        left_v + t * (right_v - left_v),
        right_v - (1.0 - t) * (right_v - left_v),
    )
    return np.clip(v, np.minimum(left_v, right_v), np.maximum(left_v, right_v))
