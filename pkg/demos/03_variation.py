"""
How the span moves with the domain
==================================

A family R(t) of domains over a small parameter disk.  On the Hartogs
family the boundary curvature vanishes and the whole second variation
comes from the area term.  The concave family is a control where the span
fails to be subharmonic.
"""

import numpy as np

from hspan import oracles
from hspan.variation import (
    DomainFamily,
    family,
    fd_derivative,
    first_variation,
    second_variation_span,
    subharmonicity_scan,
    t_grid,
)

hartogs = family("hartogs")
print("d alpha/dt   formula", first_variation(hartogs, 0.0, "alpha").real,
      " fd", fd_derivative(hartogs, 0.0, "alpha").real,
      " exact", oracles.hartogs_dalpha_dt())

sv = second_variation_span(hartogs, 0.0, parts=True)
print("lap span     formula", sv.total, " exact", oracles.hartogs_lap_span(),
      " (boundary part", sv.boundary, ")")

###############################################################################
# A hole that moves while the marked points stay put: the boundary term
# alone carries the variation.

mh = family("moving_hole")
t = 0.1 + 0.05j
print("moving hole: formula", first_variation(mh, t, "span"), " fd", fd_derivative(mh, t, "span"))

###############################################################################
# A zero that moves inside a fixed disk.  Now the boundary term is zero and
# the section terms carry everything.

mz = DomainFamily.from_dict({
    "phi": "abs2(z) - 1",
    "curves": [{"coeffs_t": [[1, "1", "0"]]}],
    "a": "0", "b": "0.25 + 0.5*t", "radius": 0.5,
}, name="moving_zero")
xi = 0.25 + 0.5 * t
print("moving zero: bare", first_variation(mz, t, "span"),
      " with sections", first_variation(mz, t, "span_full"),
      " fd", fd_derivative(mz, t, "span"),
      " exact", np.conj(xi) / (1 - abs(xi) ** 2))

###############################################################################
# Scans over a 5x5 grid.

for name in ("hartogs", "ball", "concave"):
    rep = subharmonicity_scan(family(name), t_grid(0.0, 0.2, 5))
    f = rep.flags
    print(f"{name:8s} pseudoconvex={f['pseudoconvex']!s:5s} "
          f"span subharmonic={f['span_subharmonic']!s:5s} min lap={f['min_lap_span']:.6f}")
print("concave exact lap", oracles.concave_lap_span())
