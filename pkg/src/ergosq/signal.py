"""Piecewise-constant signals on a dyadic grid.

A signal lives on ``cell_count`` consecutive cells of side ``2**k_min``;
cell ``j`` covers ``[(origin_index + j) * h, (origin_index + j + 1) * h)``.
Outside that window the function is zero, so every signal is compactly
supported.  Intervals are half-open ``[a, b)`` throughout.  For
piecewise-constant functions the choice between ``(x - 2**k, x]`` and
``[x - 2**k, x)`` only moves a null set, so averages are unaffected.

In integer-line mode the cells are the integers themselves (``k_min`` is
0) and integrals are sums against counting measure.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractError

REAL = "real"
INTEGER = "integer"
MODES = (REAL, INTEGER)


@dataclass(frozen=True)
class GridSpec:
    k_min: int
    origin_index: int
    cell_count: int
    mode: str = REAL

    def __post_init__(self):
        if self.cell_count < 1:
            raise ContractError(f"cell_count must be >= 1, got {self.cell_count}")
        if self.mode not in MODES:
            raise ContractError(f"unknown grid mode {self.mode!r}")
        if self.mode == INTEGER and self.k_min != 0:
            raise ContractError("integer-line grids have k_min == 0")

    @property
    def h(self) -> float:
        """Cell side length ``2**k_min``."""
        return math.ldexp(1.0, self.k_min)

    @property
    def lo(self) -> float:
        return self.origin_index * self.h

    @property
    def hi(self) -> float:
        return (self.origin_index + self.cell_count) * self.h

    @property
    def length(self) -> float:
        return self.cell_count * self.h

    def points(self, cells=None) -> np.ndarray:
        """Evaluation points: cell midpoints (real line) or the integers."""
        cells = np.arange(self.cell_count) if cells is None else np.asarray(cells)
        shift = 0.5 if self.mode == REAL else 0.0
        return (self.origin_index + cells + shift) * self.h

    def cell_of(self, x) -> np.ndarray:
        """Local index of the cell containing each ``x`` (may fall outside the window)."""
        return np.floor(np.asarray(x, dtype=float) / self.h).astype(np.int64) - self.origin_index

    def to_dict(self) -> dict:
        return {
            "k_min": self.k_min,
            "origin_index": self.origin_index,
            "cell_count": self.cell_count,
            "mode": self.mode,
        }


@dataclass(frozen=True, eq=False)
class Signal:
    """Immutable step function; prefix sums are computed once on construction."""

    grid: GridSpec
    values: np.ndarray
    prefix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        prefix = np.zeros(values.size + 1)
        np.cumsum(values * self.grid.h, out=prefix[1:])
        prefix.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "prefix", prefix)

    @property
    def n(self) -> int:
        return self.grid.cell_count

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def l1_norm(self) -> float:
        return float(self.grid.h * np.sum(np.abs(self.values)))

    def cumulative(self, t) -> np.ndarray:
        """``F(t)``, the integral of the signal over ``(-inf, t)``.

        Piecewise linear in ``t`` on the real line, so the interpolation is
        exact; at grid-aligned ``t`` it returns a stored prefix sum verbatim.
        """
        g = self.grid
        t = np.asarray(t, dtype=float)
        u = t / g.h - g.origin_index
        if g.mode == INTEGER:
            idx = np.clip(np.ceil(u), 0, g.cell_count).astype(np.int64)
            return self.prefix[idx]
        u = np.clip(u, 0.0, float(g.cell_count))
        i = np.floor(u).astype(np.int64)
        frac = u - i
        slope = self.values[np.minimum(i, g.cell_count - 1)] * g.h
        return self.prefix[i] + frac * slope

    def with_values(self, values) -> "Signal":
        return make_signal(values, self.grid)

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    __hash__ = None


def make_signal(values, grid: GridSpec) -> Signal:
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size != grid.cell_count:
        raise ContractError(
            f"got {values.size} values for a grid of {grid.cell_count} cells"
        )
    if not np.all(np.isfinite(values)):
        raise ContractError("signal values must be finite")
    return Signal(grid, values)


def signal_on(values, lo: float, k_min: int, mode: str = REAL) -> Signal:
    """Build a signal whose window starts at ``lo`` (a multiple of ``2**k_min``)."""
    origin = lo / math.ldexp(1.0, k_min)
    if origin != int(origin):
        raise ContractError(f"window start {lo} is not aligned to level {k_min}")
    values = np.asarray(values, dtype=np.float64).ravel()
    return make_signal(values, GridSpec(k_min, int(origin), values.size, mode))


def integral(signal: Signal, a: float, b: float) -> float:
    """Exact integral over ``[a, b)``; mass outside the window is zero."""
    if a > b:
        raise ContractError(f"integral bounds out of order: a={a} > b={b}")
    F = signal.cumulative(np.array([a, b], dtype=float))
    return float(F[1] - F[0])


def l1_norm(signal: Signal) -> float:
    return signal.l1_norm


# ---------------------------------------------------------------------------
# file formats

def dumps_json(signal: Signal) -> str:
    return json.dumps({"grid": signal.grid.to_dict(), "values": signal.values.tolist()})


def loads_json(text: str) -> Signal:
    try:
        doc = json.loads(text)
        grid = GridSpec(**doc["grid"])
        values = doc["values"]
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ContractError(f"malformed signal JSON: {exc}") from None
    return make_signal(values, grid)


def dumps_csv(signal: Signal) -> str:
    g = signal.grid
    buf = io.StringIO()
    if g.mode == REAL:
        buf.write("k_min,origin_index\n")
        buf.write(f"{g.k_min},{g.origin_index}\n")
    else:
        buf.write("k_min,origin_index,mode\n")
        buf.write(f"{g.k_min},{g.origin_index},{g.mode}\n")
    for v in signal.values:
        buf.write(repr(float(v)) + "\n")
    return buf.getvalue()


def loads_csv(text: str) -> Signal:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    try:
        header = [c.strip() for c in rows[0]]
        if header[:2] != ["k_min", "origin_index"]:
            raise ContractError(f"unexpected signal CSV header {header}")
        meta = dict(zip(header, (c.strip() for c in rows[1])))
        values = [float(r[0]) for r in rows[2:]]
        grid = GridSpec(
            int(meta["k_min"]),
            int(meta["origin_index"]),
            len(values),
            meta.get("mode", REAL),
        )
    except (IndexError, KeyError, ValueError) as exc:
        if isinstance(exc, ContractError):
            raise
        raise ContractError(f"malformed signal CSV: {exc}") from None
    return make_signal(values, grid)


def save_signal(signal: Signal, path) -> None:
    path = Path(path)
    text = dumps_csv(signal) if path.suffix.lower() == ".csv" else dumps_json(signal)
    path.write_text(text)


def load_signal(path) -> Signal:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return loads_csv(text)
    return loads_json(text)
