"""Dyadic intervals and the martingale expectations ``E_k``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .signal import INTEGER, GridSpec, Signal

# Block sizes 2**(k - k_min) are held in int64.
MAX_SPAN = 60


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``[m * 2**k, (m + 1) * 2**k)``."""

    k: int
    m: int

    @property
    def length(self) -> float:
        return math.ldexp(1.0, self.k)

    @property
    def lo(self) -> float:
        return self.m * self.length

    @property
    def hi(self) -> float:
        return (self.m + 1) * self.length

    @property
    def center(self) -> float:
        return (self.m + 0.5) * self.length

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return DyadicInterval(self.k - 1, 2 * self.m), DyadicInterval(self.k - 1, 2 * self.m + 1)

    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.k + 1, self.m // 2)

    def contains(self, x: float) -> bool:
        return self.lo <= x < self.hi

    def contains_interval(self, other: "DyadicInterval") -> bool:
        return other.k <= self.k and (other.m >> (self.k - other.k)) == self.m

    def cells(self, grid: GridSpec) -> np.ndarray:
        """Local indices of the grid cells lying in this interval (clipped to the window)."""
        if self.k < grid.k_min:
            raise ContractError(f"interval level {self.k} is finer than the grid ({grid.k_min})")
        B = 1 << (self.k - grid.k_min)
        lo = self.m * B - grid.origin_index
        return np.arange(max(lo, 0), min(lo + B, grid.cell_count), dtype=np.int64)

    def __str__(self):
        return f"[{self.lo!r}, {self.hi!r})"


def cell(k: int, x: float) -> DyadicInterval:
    """The atom of the level-``k`` dyadic sigma-algebra containing ``x``."""
    return DyadicInterval(k, math.floor(math.ldexp(x, -k)))


def expectation(signal: Signal, k: int, x: float) -> float:
    """``E_k f(x)``: the average of the signal over ``cell(k, x)``.

    Below the grid level the signal is already measurable, and the
    average collapses to the value of the cell containing ``x``.
    """
    g = signal.grid
    if k <= g.k_min:
        j = int(g.cell_of(x))
        return float(signal.values[j]) if 0 <= j < g.cell_count else 0.0
    atom = cell(k, x)
    F = signal.cumulative(np.array([atom.lo, atom.hi]))
    return math.ldexp(float(F[1] - F[0]), -k)


def _clip_prefix(prefix: np.ndarray, idx) -> np.ndarray:
    return np.take(prefix, idx, mode="clip")


def block_size(grid: GridSpec, k: int) -> int:
    span = k - grid.k_min
    if span < 0:
        raise ContractError(f"scale {k} is below the grid level {grid.k_min}")
    if span > MAX_SPAN:
        raise ContractError(f"scale {k} is more than {MAX_SPAN} levels above the grid")
    return 1 << span


def expectation_at(signal: Signal, k: int, cells) -> np.ndarray:
    """``E_k f`` at the evaluation points of the given cells."""
    g = signal.grid
    cells = np.asarray(cells, dtype=np.int64)
    if k <= g.k_min:
        return signal.values[cells].copy()
    B = block_size(g, k)
    start = (g.origin_index + cells) // B * B - g.origin_index
    total = _clip_prefix(signal.prefix, start + B) - _clip_prefix(signal.prefix, start)
    return np.ldexp(total, -k)


def expectation_profile(signal: Signal, k: int) -> np.ndarray:
    """``E_k f`` on every grid cell, in ``O(cell_count)``."""
    return expectation_at(signal, k, np.arange(signal.n))


def enumerate_dyadic(window: GridSpec, k_lo: int, k_hi: int) -> list[DyadicInterval]:
    """All dyadic intervals of levels ``k_lo..k_hi`` meeting the window, finest first."""
    if k_lo > k_hi:
        raise ContractError(f"empty level range [{k_lo}, {k_hi}]")
    out = []
    for k in range(k_lo, k_hi + 1):
        side = math.ldexp(1.0, k)
        m_lo = math.floor(window.lo / side)
        m_hi = math.ceil(window.hi / side)
        out.extend(DyadicInterval(k, m) for m in range(m_lo, m_hi))
    return out


def window_level(grid: GridSpec) -> int:
    """Smallest level whose intervals are at least as long as the window."""
    return grid.k_min + max(0, math.ceil(math.log2(grid.cell_count)))


def is_integer_mode(grid: GridSpec) -> bool:
    return grid.mode == INTEGER
