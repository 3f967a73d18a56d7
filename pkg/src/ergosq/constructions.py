"""The counterexample signals and selectors for the L-infinity behaviour of S_I and S.

* :func:`halfline_example` -- ``chi_[0, inf)`` with left-sided intervals; at a
  point of ``[0, 2**l)`` every scale above ``l`` contributes at least 1/2, so
  the square function grows like the square root of the number of scales.
* :func:`theorem1ii_example` -- ``chi_[1/2, 1)`` with a selector that is
  right-sided on a set ``P`` and left-sided on ``N``; near 1/2 the two sets
  see very different square functions, and the mean oscillation on
  ``[1/2, 1/2 + 2**-l)`` grows like ``sqrt(l)``.
* :func:`integer_example` -- the half-line example on the integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicInterval
from .errors import ContractError
from .selector import LeftSelector, MembershipSelector
from .signal import INTEGER, GridSpec, Signal, make_signal
from .sqfn import ScaleRange

UNASSIGNED, P_SET, N_SET = 0, 1, -1


def halfline_example(W: int, k_min: int = 0):
    """``chi_[0, 2**W)`` on ``[-2**W, 2**W)`` with the left selector.

    Returns ``(signal, selector, growth)`` where ``growth(K)`` is the
    guaranteed lower bound ``sqrt(K) / 2`` for the square function over
    scales ``1..K`` at any point of ``(0, 1)``.
    """
    if W < 2:
        raise ContractError("halfline example needs W >= 2")
    half = 1 << (W - k_min)
    grid = GridSpec(k_min, -half, 2 * half)
    values = np.concatenate([np.zeros(half), np.ones(half)])
    return make_signal(values, grid), LeftSelector(), lambda K: 0.5 * math.sqrt(K)


def integer_example(W: int):
    """Integer-line half-line example on ``[-2**W, 2**W)``; scales ``0..W``."""
    if W < 1:
        raise ContractError("integer example needs W >= 1")
    half = 1 << W
    grid = GridSpec(0, -half, 2 * half, INTEGER)
    values = np.concatenate([np.zeros(half), np.ones(half)])
    return make_signal(values, grid), LeftSelector()


def ring_interval(ell: int) -> DyadicInterval:
    """``[1/2, 1/2 + 2**-ell)`` as a dyadic interval."""
    return DyadicInterval(-ell, 1 << (ell - 1))


@dataclass(frozen=True, eq=False)
class PNTable:
    """Membership of the cells of ``[0, 2)`` (side ``2**-R``) in ``P``, ``N`` or neither."""

    resolution: int
    ell_max: int
    membership: np.ndarray

    @property
    def grid(self) -> GridSpec:
        return GridSpec(-self.resolution, 0, self.membership.size)

    def cells_in(self, ell: int, which: int) -> np.ndarray:
        cells = ring_interval(ell).cells(self.grid)
        return cells[self.membership[cells] == which]

    def measure(self, ell: int, which: int) -> float:
        """``|which ∩ I_ell|`` by exact cell counting."""
        return math.ldexp(float(self.cells_in(ell, which).size), -self.resolution)

    @property
    def p_table(self) -> np.ndarray:
        return self.membership == P_SET


def pn_table(ell_max: int, resolution: int) -> PNTable:
    """Split ``[1/2, 5/8)`` into ``P`` and ``N`` with equal mass in every ``I_ell``.

    Each ring ``[1/2 + 2**-(m+1), 1/2 + 2**-m)``, ``3 <= m <= ell_max``, gives
    its left half to ``P`` and its right half to ``N``; the innermost piece
    ``[1/2, 1/2 + 2**-(ell_max+1))`` is halved the same way.  Then
    ``|P ∩ I_ell| = |N ∩ I_ell| = 2**-(ell+1)`` for ``3 <= ell <= ell_max``.
    """
    if ell_max < 3:
        raise ContractError("pn_table needs ell_max >= 3")
    if resolution < ell_max + 4:
        raise ContractError(f"resolution {resolution} < ell_max + 4 = {ell_max + 4}")
    R = resolution
    membership = np.zeros(1 << (R + 1), dtype=np.int8)
    half = 1 << (R - 1)  # cell index of 1/2

    def split(lo, hi):
        mid = (lo + hi) // 2
        membership[lo:mid] = P_SET
        membership[mid:hi] = N_SET

    for m in range(3, ell_max + 1):
        split(half + (1 << (R - m - 1)), half + (1 << (R - m)))
    split(half, half + (1 << (R - ell_max - 1)))
    return PNTable(R, ell_max, membership)


@dataclass(frozen=True)
class Theorem1iiPredictions:
    """The bounds the construction is meant to exhibit on ``I_ell``."""

    def p_upper(self, ell: int) -> float:
        return 1.0

    def n_lower(self, ell: int) -> float:
        # ell - 2 scales in (-ell, -2] each contribute at least 1/2
        return 0.5 * math.sqrt(ell - 2)

    def n_lower_as_stated(self, ell: int) -> float:
        return 0.5 * math.sqrt(ell - 1)

    def oscillation_lower(self, ell: int) -> float:
        return math.sqrt(ell) / 16.0


def theorem1ii_example(ell_max: int, resolution: int):
    """``chi_[1/2, 1)`` on ``[0, 2)`` with the ``P``-right / ``N``-left selector.

    Returns ``(signal, selector, table, predictions)``.
    """
    table = pn_table(ell_max, resolution)
    grid = table.grid
    values = np.zeros(grid.cell_count)
    values[1 << (resolution - 1): 1 << resolution] = 1.0
    signal = make_signal(values, grid)
    return signal, MembershipSelector(grid, table.p_table), table, Theorem1iiPredictions()


def theorem1ii_scales(resolution: int, extra: int = 24) -> ScaleRange:
    """Grid level up to ``2**extra`` past the unit scale; tail ~ ``2**-extra``."""
    return ScaleRange(-resolution, extra)


def indicator(grid: GridSpec, lo: float, hi: float) -> Signal:
    """``chi_[lo, hi)`` sampled on the grid (endpoints should be grid-aligned)."""
    x = grid.points()
    return make_signal(((x >= lo) & (x < hi)).astype(float), grid)
