"""Left-anchored windows on a half-line indicator: the square function diverges.

At x = 0.5 the window [x - 2^k, x) keeps overlapping the support of
f = 1_[0, W) while the dyadic expectation drops to zero, so every scale
contributes at least 1/2 and the truncated sum grows like sqrt(K).
"""
import numpy as np

from ergosq import ScaleRange, halfline_example, s_selector

W = 20
f, sel, growth = halfline_example(W)
cell = int(f.grid.cell_of(0.5))

res = s_selector(f, sel, ScaleRange(1, W), cells=[cell], dump_terms=True)
terms = res.per_scale_terms[0]
value = np.sqrt(np.cumsum(terms**2))

print(f"{'K':>3} {'term':>8} {'value(K)':>10} {'sqrt(K)/2':>10}")
for K, (t, v) in enumerate(zip(terms, value), start=1):
    print(f"{K:>3} {t:8.4f} {v:10.4f} {growth(K):10.4f}")
# a single offset choice per scale is enough to break boundedness
print("min term:", terms.min())
