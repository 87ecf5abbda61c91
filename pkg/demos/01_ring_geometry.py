"""
Ring trap geometry
==================

Find the field-null height of a planar ring trap, pick the ring ratio that
maximises steepness or depth, and look at the axial pseudopotential.
"""

import numpy as np

from trapforge.dynamics import electron
from trapforge.geometry import (
    RingGeometry, depth_shape, escape_height, optimize_ratio, pseudopotential_profile,
)

# a 1.3 mm / 5.7 mm ring holds its null about 1.8 mm above the plane
ring = RingGeometry(1.3e-3, 5.7e-3)
print(f"null height h = {ring.height * 1e3:.4f} mm, escape point z_max = "
      f"{escape_height(ring) * 1e3:.4f} mm")

# best outer/inner ratio for each metric at a fixed null height
for metric in ("steepness", "depth"):
    r = optimize_ratio(metric)
    best = RingGeometry.from_height(ring.height, r)
    print(f"{metric:>9}: b/a = {r:.4f}, a = {best.inner_radius * 1e3:.4f} mm, "
          f"b = {best.outer_radius * 1e3:.4f} mm")

# axial pseudopotential for an electron at 88 V, 2.37 GHz
Omega = 2 * np.pi * 2.37e9
z = np.linspace(0, 6 * ring.outer_radius, 4001)
prof = pseudopotential_profile(ring, 88.0, Omega, electron(), z)
print(f"depth {prof.depth_K:.1f} K, axial secular frequency "
      f"{prof.secular_frequency / (2 * np.pi) / 1e6:.1f} MHz")

# depth at other ratios follows the closed-form shape law
for r in (3.0, 4.47, 8.0):
    g = RingGeometry.from_height(ring.height, r)
    d = pseudopotential_profile(g, 88.0, Omega, electron(), np.linspace(0, 6 * g.outer_radius, 4001))
    print(f"r = {r}: depth ratio {d.depth / prof.depth:.4f}, "
          f"shape law {depth_shape(r) / depth_shape(ring.ratio):.4f}")
