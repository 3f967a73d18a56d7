"""Dyadic BMO, L^p norms, and the L-infinity-to-BMO certificate for ``S``.

The certificate walks the standard good/bad split for one dyadic interval
``I``: ``f = f 1_{I*} + f 1_{R \\ I*}`` with ``I*`` the concentric interval
of three times the length, the constant ``a_I = S f_2(c_I)``, and then
checks each inequality of the estimate numerically on the given signal.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dyadic import DyadicInterval, block_size, enumerate_dyadic, expectation_at, window_level
from .errors import ContractError
from .signal import REAL, GridSpec, Signal
from .sqfn import ScaleRange, check_range, default_range, s_sup

# round-off allowance for inequalities that are not exact in floating point
RTOL = 1e-12


def lp_norm(g, grid: GridSpec, p: float) -> float:
    """``(h * sum |g|**p) ** (1/p)`` for a function constant on grid cells."""
    if not p >= 1:
        raise ContractError(f"L^p norm needs p >= 1, got {p}")
    g = np.abs(np.asarray(g, dtype=float))
    if math.isinf(p):
        return float(g.max(initial=0.0))
    return float((grid.h * np.sum(g**p)) ** (1.0 / p))


@dataclass(frozen=True)
class OscillationReport:
    interval: DyadicInterval
    minimizer: float
    mean_oscillation: float
    sample_count: int

    def to_dict(self):
        return {
            "interval": {"k": self.interval.k, "m": self.interval.m,
                         "lo": self.interval.lo, "hi": self.interval.hi},
            "minimizer": self.minimizer,
            "mean_oscillation": self.mean_oscillation,
            "sample_count": self.sample_count,
        }


def lower_median(v) -> float:
    v = np.sort(np.asarray(v, dtype=float))
    return float(v[(v.size - 1) // 2])


def mean_oscillation(g, grid: GridSpec, interval: DyadicInterval) -> OscillationReport:
    """Mean absolute deviation of ``g`` from its lower median on ``interval`` (within the window)."""
    g = np.asarray(g, dtype=float)
    cells = interval.cells(grid)
    if cells.size == 0:
        raise ContractError(f"interval {interval} does not meet the window")
    vals = g[cells]
    med = lower_median(vals)
    return OscillationReport(interval, med, float(np.mean(np.abs(vals - med))), int(cells.size))


def _level_oscillations(g, grid: GridSpec, k: int):
    B = block_size(grid, k)
    block = (grid.origin_index + np.arange(grid.cell_count)) // B
    order = np.lexsort((g, block))
    gs = g[order]
    bs = block[order]
    ids, starts, counts = np.unique(bs, return_index=True, return_counts=True)
    med = gs[starts + (counts - 1) // 2]
    dev = np.abs(gs - np.repeat(med, counts))
    mo = np.add.reduceat(dev, starts) / counts
    return ids, med, mo, counts


def bmo_dyadic(g, grid: GridSpec, k_lo: int | None = None, k_hi: int | None = None):
    """Sup of mean oscillations over the dyadic intervals meeting the window.

    Each interval is measured on its intersection with the window, which is
    where ``g`` is known.  Returns ``(value, report)`` for the witness.
    """
    g = np.asarray(g, dtype=float)
    if g.size != grid.cell_count or g.size == 0:
        raise ContractError("BMO needs one value per grid cell of a non-empty window")
    k_lo = grid.k_min if k_lo is None else k_lo
    k_hi = window_level(grid) + 1 if k_hi is None else k_hi
    if k_lo > k_hi:
        raise ContractError(f"empty level range [{k_lo}, {k_hi}]")
    if k_lo < grid.k_min:
        raise ContractError("BMO levels below the grid add nothing; start at k_min")
    best = None
    for k in range(k_lo, k_hi + 1):
        ids, med, mo, counts = _level_oscillations(g, grid, k)
        i = int(np.argmax(mo))
        if best is None or mo[i] > best.mean_oscillation:
            best = OscillationReport(DyadicInterval(k, int(ids[i])), float(med[i]),
                                     float(mo[i]), int(counts[i]))
    return best.mean_oscillation, best


# ---------------------------------------------------------------------------
# certificate

@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float
    passed: bool

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "pass": self.passed}


def _leq(name, lhs, rhs, allowance=0.0):
    return Inequality(name, float(lhs), float(rhs), bool(lhs <= rhs + allowance))


@dataclass(frozen=True)
class Theorem2Certificate:
    interval: DyadicInterval
    enlarged: tuple[float, float]
    center_point: float
    a_I: float
    mean_oscillation: float
    term1: float
    term2: float
    small_scale_residual: float
    translation_worst: list = field(repr=False)
    geometric_tail: float
    ratio: float
    l2_constant: float
    inequalities: list = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(q.passed for q in self.inequalities)

    def failures(self) -> list[Inequality]:
        return [q for q in self.inequalities if not q.passed]

    def to_dict(self):
        return {
            "interval": {"k": self.interval.k, "m": self.interval.m,
                         "lo": self.interval.lo, "hi": self.interval.hi},
            "enlarged": list(self.enlarged),
            "center_point": self.center_point,
            "a_I": self.a_I,
            "mean_oscillation": self.mean_oscillation,
            "term1": self.term1,
            "term2": self.term2,
            "small_scale_residual": self.small_scale_residual,
            "translation_worst": self.translation_worst,
            "geometric_tail": self.geometric_tail,
            "ratio": self.ratio,
            "l2_constant": self.l2_constant,
            "inequalities": [q.to_dict() for q in self.inequalities],
            "pass": self.passed,
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def theorem2_certificate(signal: Signal, interval: DyadicInterval,
                         scales: ScaleRange | None = None,
                         sf: np.ndarray | None = None) -> Theorem2Certificate:
    """Check every step of the ``L^inf_c -> BMO_d`` estimate for ``S`` on one interval.

    ``sf`` may carry ``s_sup(signal, scales)`` on the whole window when many
    intervals of one signal are certified.
    """
    g = signal.grid
    scales = scales or default_range(signal)
    check_range(signal, scales)
    if interval.k < g.k_min:
        raise ContractError(f"interval level {interval.k} is below the grid")
    B = block_size(g, interval.k)
    n = signal.n
    first = interval.m * B - g.origin_index
    if first < 0 or first + B > n:
        raise ContractError(f"interval {interval} is not inside the window")
    star_lo, star_hi = first - B, first + 2 * B
    if star_lo < 0 or star_hi > n:
        raise ContractError(f"enlarged interval of {interval} exceeds the window")

    cells = np.arange(first, first + B, dtype=np.int64)
    inside = np.zeros(n, dtype=bool)
    inside[star_lo:star_hi] = True
    f1 = signal.with_values(np.where(inside, signal.values, 0.0))
    f2 = signal.with_values(np.where(inside, 0.0, signal.values))
    fnorm = signal.sup_norm
    l1 = signal.l1_norm

    # c_I is snapped to the cell point just right of (or at) the centre
    cc = first + B // 2
    c_point = float(g.points([cc])[0])

    Sf = s_sup(signal, scales, cells=cells).values if sf is None else np.asarray(sf)[cells]
    Sf1_all = s_sup(f1, scales).values
    Sf1 = Sf1_all[cells]
    a_I = float(s_sup(f2, scales, cells=[cc]).values[0])

    osc = float(np.mean(np.abs(Sf - a_I)))
    term1 = float(np.mean(Sf1))
    rms1 = float(np.sqrt(np.mean(Sf1**2)))

    qs = [_leq("cauchy_schwarz", term1, rms1, RTOL * max(rms1, 1.0))]

    window_l2 = math.sqrt(g.h * float(np.sum(Sf1_all**2)))
    f1_l2 = math.sqrt(g.h * float(np.sum(f1.values**2)))
    qs.append(_leq("term1_l2_localisation", rms1, window_l2 / math.sqrt(B * g.h),
                   RTOL * max(rms1, 1.0)))
    l2_constant = window_l2 / f1_l2 if f1_l2 > 0 else 0.0

    # small scales: the f2 mass seen by any admissible window at x, plus |E_k f2(x)|
    absP = np.zeros(n + 1)
    np.cumsum(np.abs(f2.values) * g.h, out=absP[1:])
    residual = 0.0
    real = g.mode == REAL
    dist = np.abs(cells - cc) * g.h
    term2_sq = np.zeros(cells.size)
    term2_bound = np.zeros(cells.size)
    worst = []
    mismatches = 0
    trans_ok = True
    for k in scales.coarse_to_fine():
        N = block_size(g, k)
        if k < interval.k:
            lo = np.clip(cells - N, 0, n)
            hi = np.clip(cells + N + 1, 0, n)
            mass = np.ldexp(absP[hi] - absP[lo], -k)
            e2 = np.abs(expectation_at(f2, k, cells))
            residual = max(residual, float(np.max(mass + e2)))
            continue
        e_x = expectation_at(f2, k, cells)
        e_c = expectation_at(f2, k, [cc])[0]
        mismatches += int(np.count_nonzero(e_x != e_c))
        sup_diff = np.ldexp(
            _kernels.translation_sup(f2.prefix, n, N, cc, cells, real), -k
        )
        bound = math.ldexp(2.0, -k) * dist * fnorm
        allowance = RTOL * math.ldexp(l1, -k)
        gap = sup_diff - bound
        i = int(np.argmax(gap))
        worst.append({"k": k, "lhs": float(sup_diff[i]), "rhs": float(bound[i]),
                      "pass": bool(gap[i] <= allowance)})
        trans_ok &= bool(np.all(gap <= allowance))
        d = sup_diff + np.abs(e_x - e_c)
        term2_sq += d * d
        term2_bound += bound

    qs.append(Inequality("small_scale_residual", residual, 0.0, residual == 0.0))
    qs.append(Inequality("expectation_match", float(mismatches), 0.0, mismatches == 0))
    if worst:
        w = max(worst, key=lambda r: r["lhs"] - r["rhs"])
        qs.append(Inequality("translation_bound", w["lhs"], w["rhs"], trans_ok))

    term2 = float(np.mean(np.sqrt(term2_sq)))
    qs.append(_leq("term2_geometric", term2, float(np.mean(term2_bound)),
                   RTOL * max(term2, 1.0)))
    qs.append(_leq("split", osc, term1 + term2, RTOL * max(osc, 1.0)))

    side = interval.length
    tail = side * math.ldexp(1.0, -interval.k) / (1.0 - 0.5)
    partial = sum(side * math.ldexp(1.0, -k)
                  for k in range(max(interval.k, scales.k_lo), scales.k_hi + 1))
    qs.append(Inequality("geometric_tail", tail, 2.0, tail == 2.0))
    qs.append(_leq("geometric_partial", partial, 2.0))

    return Theorem2Certificate(
        interval=interval,
        enlarged=((g.origin_index + star_lo) * g.h, (g.origin_index + star_hi) * g.h),
        center_point=c_point,
        a_I=a_I,
        mean_oscillation=osc,
        term1=term1,
        term2=term2,
        small_scale_residual=residual,
        translation_worst=worst,
        geometric_tail=tail,
        ratio=osc / fnorm if fnorm > 0 else 0.0,
        l2_constant=l2_constant,
        inequalities=qs,
    )


def certify_sweep(signal: Signal, scales: ScaleRange | None = None,
                  intervals=None) -> list[Theorem2Certificate]:
    """Certificates for every dyadic interval of the window that has room for ``I*``."""
    scales = scales or default_range(signal)
    intervals = certifiable_intervals(signal.grid) if intervals is None else intervals
    sf = s_sup(signal, scales).values
    return [theorem2_certificate(signal, iv, scales, sf=sf) for iv in intervals]


def certifiable_intervals(grid: GridSpec, k_lo: int | None = None,
                          k_hi: int | None = None) -> list[DyadicInterval]:
    """Dyadic intervals inside the window whose threefold enlargement also fits."""
    k_lo = grid.k_min if k_lo is None else k_lo
    k_hi = window_level(grid) if k_hi is None else k_hi
    out = []
    for iv in enumerate_dyadic(grid, k_lo, k_hi):
        B = block_size(grid, iv.k)
        first = iv.m * B - grid.origin_index
        if first - B >= 0 and first + 2 * B <= grid.cell_count:
            out.append(iv)
    return out
