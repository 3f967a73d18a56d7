"""Certificates for the supremal square function on bounded signals.

For each dyadic I the certificate splits f into a local part on the tripled
interval and a far part, then checks each inequality of the boundedness
argument numerically: the L2 localisation, vanishing small scales, the
translation bound and the geometric tail.
"""
import numpy as np

from ergosq import DyadicInterval, GridSpec, ScaleRange, certify_sweep, indicator
from ergosq import theorem2_certificate

g = GridSpec(-5, 0, 64)  # [0, 2)
f = indicator(g, 0.5, 1.0)
scales = ScaleRange(-5, 15)

cert = theorem2_certificate(f, DyadicInterval(-3, 4), scales)  # [1/2, 5/8)
for q in cert.inequalities:
    print(f"{q.name:>24}  lhs={q.lhs:.6g}  rhs={q.rhs:.6g}  {'ok' if q.passed else 'FAIL'}")

certs = certify_sweep(f, scales)
ratios = np.array([c.ratio for c in certs])
print(f"{len(certs)} intervals, {sum(not c.passed for c in certs)} failures, "
      f"max oscillation / |f|_inf = {ratios.max():.4f}")
