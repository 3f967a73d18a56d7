"""Interval selectors: a choice of one length-``2**k`` interval per (scale, point).

A selector is described by its offset rule ``a = rule(k, x)`` with
``0 <= a <= 2**k``; the chosen interval is ``[x - a, x - a + 2**k)``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ContractError
from .signal import GridSpec


class Selector:
    kind = "abstract"

    def offsets(self, k: int, x) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"kind": self.kind}

    def __eq__(self, other):
        return type(self) is type(other) and _dict_equal(self.to_dict(), other.to_dict())

    def __hash__(self):
        return hash(self.kind)

    def __repr__(self):
        return f"{type(self).__name__}()"


def _dict_equal(a, b):
    return json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


class LeftSelector(Selector):
    """``[x - 2**k, x)``."""

    kind = "left"

    def offsets(self, k, x):
        return np.full(np.shape(x), math.ldexp(1.0, k))


class RightSelector(Selector):
    """``[x, x + 2**k)``."""

    kind = "right"

    def offsets(self, k, x):
        return np.zeros(np.shape(x))


class CenteredSelector(Selector):
    kind = "centered"

    def offsets(self, k, x):
        return np.full(np.shape(x), math.ldexp(1.0, k - 1))


_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _u64(v) -> np.ndarray:
    return np.asarray(v, dtype=np.int64).astype(np.uint64)


class RandomSelector(Selector):
    """Offsets drawn uniformly from the multiples of ``2**k_min`` in ``[0, 2**k]``.

    The draw for (scale, cell) is a SplitMix64 hash of ``(seed, k, cell)``,
    so the selector is a deterministic function of its inputs.
    """

    kind = "random"

    def __init__(self, seed: int, k_min: int):
        self.seed = int(seed)
        self.k_min = int(k_min)

    def offsets(self, k, x):
        if k < self.k_min:
            raise ContractError(f"random selector is not defined below level {self.k_min}")
        h = math.ldexp(1.0, self.k_min)
        cell = np.floor(np.asarray(x, dtype=float) / h)
        with np.errstate(over="ignore"):
            z = _splitmix64(_splitmix64(_u64(self.seed)) + _u64(k))
            z = _splitmix64(z + _u64(cell))
        choices = np.uint64((1 << (k - self.k_min)) + 1)
        return (z % choices).astype(np.float64) * h

    def to_dict(self):
        return {"kind": self.kind, "seed": self.seed, "k_min": self.k_min}

    def __repr__(self):
        return f"RandomSelector(seed={self.seed}, k_min={self.k_min})"


class _GridTable(Selector):
    def __init__(self, grid: GridSpec):
        self.grid = grid

    def _cells(self, x):
        cells = self.grid.cell_of(x)
        if np.any(cells < 0) or np.any(cells >= self.grid.cell_count):
            raise ContractError("point outside the selector's table window")
        return cells


class MembershipSelector(_GridTable):
    """Right-sided on the cells flagged in ``p_table``, left-sided everywhere else."""

    kind = "membership"

    def __init__(self, grid: GridSpec, p_table):
        super().__init__(grid)
        p_table = np.asarray(p_table, dtype=bool)
        if p_table.shape != (grid.cell_count,):
            raise ContractError("membership table must have one flag per grid cell")
        self.p_table = p_table

    def offsets(self, k, x):
        right = self.p_table[self._cells(x)]
        return np.where(right, 0.0, math.ldexp(1.0, k))

    def to_dict(self):
        return {
            "kind": self.kind,
            "grid": self.grid.to_dict(),
            "p_cells": np.flatnonzero(self.p_table).tolist(),
        }


class TabulatedSelector(_GridTable):
    """Explicit offsets for every (scale, cell) of a window."""

    kind = "tabulated"

    def __init__(self, grid: GridSpec, k_range: tuple[int, int], offsets: dict):
        super().__init__(grid)
        k_lo, k_hi = int(k_range[0]), int(k_range[1])
        if k_lo > k_hi:
            raise ContractError("empty k_range in tabulated selector")
        table = {}
        for k in range(k_lo, k_hi + 1):
            if k not in offsets:
                raise ContractError(f"tabulated selector is missing scale {k}")
            row = np.asarray(offsets[k], dtype=np.float64)
            if row.shape != (grid.cell_count,):
                raise ContractError(f"scale {k}: expected {grid.cell_count} offsets")
            side = math.ldexp(1.0, k)
            if np.any(~np.isfinite(row)) or np.any(row < 0) or np.any(row > side):
                raise ContractError(f"scale {k}: offset outside [0, 2**{k}]")
            table[k] = row
        self.k_range = (k_lo, k_hi)
        self.table = table

    def offsets(self, k, x):
        if k not in self.table:
            raise ContractError(f"tabulated selector has no offsets for scale {k}")
        return self.table[k][self._cells(x)]

    def to_dict(self):
        return {
            "kind": self.kind,
            "k_range": list(self.k_range),
            "window": self.grid.to_dict(),
            "offsets": {str(k): row.tolist() for k, row in self.table.items()},
        }


def select(selector: Selector, k: int, x: float) -> tuple[float, float]:
    """The interval ``[x - a, x - a + 2**k)`` chosen at ``(k, x)``."""
    a = float(np.asarray(selector.offsets(k, np.array([x])))[0])
    side = math.ldexp(1.0, k)
    if not 0.0 <= a <= side:
        raise ContractError(f"{selector!r} returned offset {a} outside [0, {side}]")
    return x - a, x + (side - a)


def membership_selector(p_table, grid: GridSpec) -> MembershipSelector:
    return MembershipSelector(grid, p_table)


def from_dict(doc: dict) -> Selector:
    try:
        kind = doc["kind"]
        if kind == "left":
            return LeftSelector()
        if kind == "right":
            return RightSelector()
        if kind == "centered":
            return CenteredSelector()
        if kind == "random":
            return RandomSelector(doc["seed"], doc["k_min"])
        if kind == "membership":
            grid = GridSpec(**doc["grid"])
            table = np.zeros(grid.cell_count, dtype=bool)
            table[np.asarray(doc["p_cells"], dtype=np.int64)] = True
            return MembershipSelector(grid, table)
        if kind == "tabulated":
            offsets = {int(k): v for k, v in doc["offsets"].items()}
            return TabulatedSelector(GridSpec(**doc["window"]), tuple(doc["k_range"]), offsets)
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        if isinstance(exc, ContractError):
            raise
        raise ContractError(f"malformed selector: {exc}") from None
    raise ContractError(f"unknown selector kind {doc.get('kind')!r}")


def save_selector(selector: Selector, path) -> None:
    Path(path).write_text(json.dumps(selector.to_dict()))


def load_selector(path) -> Selector:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ContractError(f"malformed selector file: {exc}") from None
    return from_dict(doc)


def parse_selector(text: str, k_min: int = 0) -> Selector:
    """Parse ``left|right|centered|random:<seed>|file:<path>``."""
    if text in ("left", "right", "centered"):
        return {"left": LeftSelector, "right": RightSelector, "centered": CenteredSelector}[text]()
    if text.startswith("random:"):
        seed = text.split(":", 1)[1]
        if not seed.lstrip("-").isdigit():
            raise ContractError(f"random selector seed must be an integer, got {seed!r}")
        return RandomSelector(int(seed), k_min)
    if text.startswith("file:"):
        return load_selector(text.split(":", 1)[1])
    raise ContractError(f"unrecognised selector {text!r}")
