"""
The harmonic span on the unit disk
==================================

Pole at 0, zero at ξ = 0.5.  Everything here has a closed form, so the
numbers printed by the solver can be read against the exact values.
"""

import numpy as np

from hspan import build_H, build_slit_map, compute_principal_pair, disk, e_log_area
from hspan import oracles
from hspan.span import poincare_distance

md = disk(1.0, 0.0, 0.0, 0.5)
pair = compute_principal_pair(md)
case = oracles.DiskCase(1.0, 0.5)
alpha, beta, s = oracles.disk_constants(case)

print(f"alpha  {pair.alpha: .12f}   exact {alpha: .12f}")
print(f"beta   {pair.beta: .12f}   exact {beta: .12f}")
print(f"span   {pair.span: .12f}   exact {s: .12f}")

###############################################################################
# Slit maps.  P sends the circle to a circular arc of radius 2, Q to a
# radial segment on the negative axis, and H = 1/z - 1/ξ.

P = build_slit_map(pair, "circular")
Q = build_slit_map(pair, "radial")
H = build_H(pair)
for z in (-0.5, 0.3j, 0.2 - 0.4j):
    print(z, P(z), oracles.disk_P(case, z), H(z) ** 2 - P(z) * Q(z))

###############################################################################
# Area of the log-image of H and the span-distance identity.

print("E_log", e_log_area(pair), "pi/2 * s", np.pi / 2 * pair.span)
d = poincare_distance(md)
print("d", d, "4 log cosh d", 4 * np.log(np.cosh(d)))

###############################################################################
# The span grows without bound as ξ approaches the circle.  Points closer
# than five node spacings to each other or to the boundary are refused.

for rho in (0.2, 0.5, 0.8, 0.85):
    print(rho, compute_principal_pair(disk(1.0, 0.0, 0.0, rho)).span, oracles.disk_span(rho))
