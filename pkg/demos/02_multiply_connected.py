"""
Slit maps of a domain with two holes
====================================

The circular slit map P sends each boundary curve to an arc of a circle
centred at 0; the radial slit map Q sends each one to a radial segment.
Their critical points on each curve interleave.
"""

import json
import os

import numpy as np

from hspan import build_slit_map, compute_principal_pair, extract_slit_data, load_domain
from hspan.plotting import plot_slits
from hspan.principal import extrema_census

here = os.path.dirname(os.path.abspath(__file__))
md = load_domain(os.path.join(here, "data", "three_connected.json"))
pair = compute_principal_pair(md, N=256)
print("connectivity", md.connectivity, "span", pair.span)

###############################################################################
# Slit geometry: radius and angular extent of each arc, angle and radial
# extent of each segment.

for kind in ("circular", "radial"):
    for j, sl in enumerate(extract_slit_data(build_slit_map(pair, kind)).slits):
        print(kind, j, "level", round(sl.level, 6), "extent", np.round(sl.extent, 6))

###############################################################################
# Interleaving of the critical points of arg P and log|Q| on each curve.

for row in extrema_census(pair):
    print(json.dumps({k: (np.round(v, 4).tolist() if isinstance(v, (list, np.ndarray)) else v)
                      for k, v in row.items()}))

###############################################################################
# Picture of both slit images.

out = os.path.join(here, "out")
os.makedirs(out, exist_ok=True)
plot_slits(pair, os.path.join(out, "three_connected_slits.svg"))
