"""Square functions comparing moving averages with dyadic expectations.

For a selector ``I`` the per-scale term at ``x`` is
``|M_{I_k(x)} f - E_k f(x)|``; ``s_selector`` takes the l2 norm of these over
a finite range of scales.  ``s_sup`` replaces each term by its supremum over
all admissible interval positions and ``s_inf`` by its infimum.

Evaluation points are cell midpoints (integers on the integer line).  At a
midpoint every term below the grid level vanishes exactly, so starting the
range at ``k_min`` loses nothing; scales above ``k_hi`` are covered by
:func:`tail_bound`.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dyadic import MAX_SPAN, block_size, expectation, expectation_at, window_level
from .errors import ContractError
from .moving import extrema, moving_average, window_sums_at
from .selector import Selector
from .signal import INTEGER, Signal


@dataclass(frozen=True)
class ScaleRange:
    k_lo: int
    k_hi: int

    def __post_init__(self):
        if self.k_lo > self.k_hi:
            raise ContractError(f"empty scale range [{self.k_lo}, {self.k_hi}]")

    def coarse_to_fine(self) -> list[int]:
        return list(range(self.k_hi, self.k_lo - 1, -1))

    def __len__(self):
        return self.k_hi - self.k_lo + 1

    @classmethod
    def parse(cls, text: str) -> "ScaleRange":
        lo, hi = text.split(":")
        return cls(int(lo), int(hi))

    def __str__(self):
        return f"{self.k_lo}:{self.k_hi}"


def default_range(signal: Signal, extra: int = 20) -> ScaleRange:
    """Grid level up to ``extra`` levels past the window size."""
    g = signal.grid
    hi = min(window_level(g) + extra, g.k_min + MAX_SPAN)
    return ScaleRange(g.k_min, hi)


def check_range(signal: Signal, scales: ScaleRange) -> None:
    g = signal.grid
    if scales.k_lo < g.k_min:
        raise ContractError(f"scale range starts at {scales.k_lo}, below the grid level {g.k_min}")
    block_size(g, scales.k_hi)


@dataclass(frozen=True, eq=False)
class SquareFunctionResult:
    cells: np.ndarray
    eval_points: np.ndarray
    values: np.ndarray
    scale_range: ScaleRange
    tail_bound: float
    per_scale_terms: np.ndarray | None = field(default=None, repr=False)

    def upper(self) -> np.ndarray:
        """Certified upper bound on the untruncated value."""
        return np.sqrt(self.values**2 + self.tail_bound**2)

    def to_csv(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value", "tail_bound"])
        for x, v in zip(self.eval_points, self.values):
            w.writerow([repr(float(x)), repr(float(v)), repr(self.tail_bound)])
        return buf.getvalue()

    def to_dict(self, dump_terms: bool = False) -> dict:
        doc = {
            "scale_range": [self.scale_range.k_lo, self.scale_range.k_hi],
            "tail_bound": self.tail_bound,
            "x": self.eval_points.tolist(),
            "value": self.values.tolist(),
        }
        if dump_terms and self.per_scale_terms is not None:
            # rows follow x; columns run k_lo..k_hi
            doc["per_scale_terms"] = self.per_scale_terms.tolist()
        return doc

    def to_json(self, dump_terms: bool = False, config: dict | None = None) -> str:
        doc = self.to_dict(dump_terms)
        if config is not None:
            doc = {"config": config, **doc}
        return json.dumps(doc)


def tail_bound(signal: Signal, k_hi: int) -> float:
    """Bound on the l2 contribution of all scales above ``k_hi``.

    Each term is at most ``2 * 2**-k * ||f||_1``; summing the squares over
    ``k > k_hi`` gives ``(2 ||f||_1)**2 * 4**-k_hi / 3``.
    """
    return 2.0 * signal.l1_norm * math.ldexp(1.0, -k_hi) / math.sqrt(3.0)


def _cells(signal: Signal, cells) -> np.ndarray:
    if cells is None:
        return np.arange(signal.n, dtype=np.int64)
    cells = np.asarray(cells, dtype=np.int64).ravel()
    if cells.size and (cells.min() < 0 or cells.max() >= signal.n):
        raise ContractError("evaluation cell outside the signal window")
    return cells


def selector_terms(signal: Signal, selector: Selector, k: int, cells) -> np.ndarray:
    """``|M_{I_k(x)} f - E_k f(x)|`` at the points of ``cells``."""
    x = signal.grid.points(cells)
    a = np.asarray(selector.offsets(k, x), dtype=float)
    side = math.ldexp(1.0, k)
    if np.any(~(a >= 0)) or np.any(~(a <= side)):
        raise ContractError(f"{selector!r} produced an offset outside [0, 2**{k}]")
    v = window_sums_at(signal, k, cells, a)
    return np.abs(np.ldexp(v, -k) - expectation_at(signal, k, cells))


def sup_terms(signal: Signal, k: int, cells) -> np.ndarray:
    ext = extrema(signal, k, cells)
    e = expectation_at(signal, k, cells)
    return np.maximum(np.ldexp(ext.max_sum, -k) - e, e - np.ldexp(ext.min_sum, -k))


def inf_terms(signal: Signal, k: int, cells) -> np.ndarray:
    e = expectation_at(signal, k, cells)
    if signal.grid.mode == INTEGER:
        N = block_size(signal.grid, k)
        best, _ = _kernels.nearest_scan(
            signal.prefix, signal.n, N, np.ascontiguousarray(cells), np.ldexp(e, k)
        )
        return np.abs(np.ldexp(best, -k) - e)
    ext = extrema(signal, k, cells)
    hi = np.ldexp(ext.max_sum, -k)
    lo = np.ldexp(ext.min_sum, -k)
    return np.where(e > hi, e - hi, np.where(e < lo, lo - e, 0.0))


def _accumulate(signal, scales, cells, term_fn, dump_terms, workers) -> SquareFunctionResult:
    check_range(signal, scales)
    cells = _cells(signal, cells)
    ks = scales.coarse_to_fine()
    acc = np.zeros(cells.size)
    terms = np.empty((cells.size, len(ks))) if dump_terms else None

    def one(k):
        return term_fn(k, cells)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(one, ks)
            for k, t in zip(ks, results):
                acc += t * t
                if terms is not None:
                    terms[:, k - scales.k_lo] = t
    else:
        for k in ks:
            t = one(k)
            acc += t * t
            if terms is not None:
                terms[:, k - scales.k_lo] = t
    return SquareFunctionResult(
        cells=cells,
        eval_points=signal.grid.points(cells),
        values=np.sqrt(acc),
        scale_range=scales,
        tail_bound=tail_bound(signal, scales.k_hi),
        per_scale_terms=terms,
    )


def s_selector(signal: Signal, selector: Selector, scales: ScaleRange | None = None,
               cells=None, dump_terms: bool = False, workers: int = 1) -> SquareFunctionResult:
    """The square function of a fixed interval selector."""
    scales = scales or default_range(signal)
    return _accumulate(
        signal, scales, cells, lambda k, c: selector_terms(signal, selector, k, c),
        dump_terms, workers,
    )


def s_sup(signal: Signal, scales: ScaleRange | None = None, cells=None,
          dump_terms: bool = False, workers: int = 1) -> SquareFunctionResult:
    """The supremal square function: worst interval position at every scale."""
    scales = scales or default_range(signal)
    return _accumulate(
        signal, scales, cells, lambda k, c: sup_terms(signal, k, c), dump_terms, workers
    )


def s_inf(signal: Signal, scales: ScaleRange | None = None, cells=None,
          dump_terms: bool = False, workers: int = 1) -> SquareFunctionResult:
    """Pointwise least square function over all selectors.

    On the real line the window sum takes every value between its extremes
    as the offset varies, so the least term is the distance from
    ``2**k E_k f(x)`` to that range.  On the integer line the offsets are
    discrete and the closest admissible sum is searched directly.
    """
    scales = scales or default_range(signal)
    return _accumulate(
        signal, scales, cells, lambda k, c: inf_terms(signal, k, c), dump_terms, workers
    )


def pointwise_term(signal: Signal, k: int, x: float, offset: float) -> float:
    """One term ``|M f - E_k f(x)|`` from the generic operations, valid at any scale."""
    side = math.ldexp(1.0, k)
    if not 0.0 <= offset <= side:
        raise ContractError(f"offset {offset} outside [0, {side}]")
    lo = x - offset
    return abs(moving_average(signal, lo, lo + side) - expectation(signal, k, x))
