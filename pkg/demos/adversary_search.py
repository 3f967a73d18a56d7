"""Search for a selector that maximises the oscillation of S_I f.

Each point x has a range [lo(x), hi(x)] of values S_I f(x) can take over all
offset choices. The adversary assigns hi or lo per point to maximise the mean
oscillation on a dyadic interval, then realises that choice as a tabulated
selector and checks it by recomputing.
"""
from ergosq import ScaleRange, adversarial_bmo, mean_oscillation, ring_interval, s_selector
from ergosq.constructions import theorem1ii_example

for ell_max, R in ((6, 10), (8, 12)):
    f, sel, _, _ = theorem1ii_example(ell_max, R)
    scales = ScaleRange(-R, 20)
    res = adversarial_bmo(f, scales, seed=0)
    hand = mean_oscillation(s_selector(f, sel, scales).values, f.grid, ring_interval(ell_max))
    print(f"l_max={ell_max}: adversary {res.bound:.4f} on [{res.witness.lo}, {res.witness.hi})"
          f"  membership {hand.mean_oscillation:.4f}  random baseline {res.baseline:.4f}"
          f"  realisation error {res.max_error:.1e}")
