"""
Coulomb plus harmonic spectrum
==============================

Levels of an electron bound to a Z = 2 core inside a harmonic pseudopotential,
solved in a B-spline basis, and the tuning of the level spacing with drive
voltage.
"""

import numpy as np

from trapforge.quantum import (
    RadialProblem, SplineBasis, eigenlevels, region_radii, spacing_profile, suggest_box_radius,
    tuning_curve,
)

Z, omega = 2.0, 1e-3  # atomic units
R = suggest_box_radius(Z, omega, 300)
ladder = eigenlevels(RadialProblem(Z, omega, 0, R, SplineBasis(7, 1600)), 300)
print(f"{ladder.converged_count} of {ladder.requested} levels converged in a {R:.0f} bohr box")
print("every 50th level [hartree]:", np.round(ladder.energies[::50], 5))

# deep levels are hydrogenic, high levels approach the oscillator spacing 2 omega
prof = spacing_profile(ladder)
print("spacing / 2 omega at n = 0, 10, 100, 298:",
      np.round(prof.spacing[[0, 10, 100, 298]] / (2 * omega), 4))
print("narrowest interior gap:", prof.min_index)

r_low, r_high = region_radii(Z, omega)
print(f"Coulomb-dominated below {r_low:.2f} bohr, harmonic above {r_high:.2f} bohr")

# relative transition energy vs drive voltage for a high and a low state
V = [0.5, 0.75, 1.0, 1.25, 1.5]
high = tuning_curve(RadialProblem(Z, omega, 0, suggest_box_radius(Z, omega, 152),
                                  SplineBasis(7, 1000)), 150, V, 1.0)
low = tuning_curve(RadialProblem(Z, omega, 0, suggest_box_radius(Z, omega, 4),
                                 SplineBasis(7, 800)), 2, V, 1.0)
for (v, h), (_, c) in zip(high, low):
    print(f"V/V_ref = {v:.2f}: state 150 -> {h:.4f}, state 2 -> {c:.6f}")
