"""Membership selector on 1_[1/2, 1): bounded f, unbounded oscillation of S_I f.

A table splits each ring I_l = [1/2, 1/2 + 2^-l) into P and N halves. On P the
selector tracks the dyadic expectation (small terms); on N it picks offsets
that stay away from it (terms near 1/2 at every coarser scale). The mean
oscillation on I_l then grows like sqrt(l), while the supremal square
function stays BMO-bounded on the same signal.
"""
import numpy as np

from ergosq import bmo_dyadic, mean_oscillation, ring_interval, s_selector, s_sup
from ergosq.constructions import N_SET, P_SET, theorem1ii_example, theorem1ii_scales

ELL_MAX, R = 10, 14
f, sel, table, pred = theorem1ii_example(ELL_MAX, R)
scales = theorem1ii_scales(R)
si = s_selector(f, sel, scales).values

print(f"{'l':>3} {'max P':>8} {'min N':>8} {'N bound':>8} {'osc':>8} {'sqrt(l)/16':>10}")
for ell in range(3, ELL_MAX + 1):
    p, n = table.cells_in(ell, P_SET), table.cells_in(ell, N_SET)
    osc = mean_oscillation(si, f.grid, ring_interval(ell)).mean_oscillation
    print(f"{ell:>3} {si[p].max():8.4f} {si[n].min():8.4f} {pred.n_lower(ell):8.4f} "
          f"{osc:8.4f} {pred.oscillation_lower(ell):10.4f}")

# contrast: BMO of S_I f grows with resolution, BMO of the supremum does not
for res in (8, 10, 12, 14):
    g, s, _, _ = theorem1ii_example(res - 4, res)
    sc = theorem1ii_scales(res)
    a = bmo_dyadic(s_sup(g, sc).values, g.grid)[0]
    b = bmo_dyadic(s_selector(g, s, sc).values, g.grid)[0]
    print(f"R={res:>2}: BMO(S f) = {a:.4f}   BMO(S_I f) = {b:.4f}")
