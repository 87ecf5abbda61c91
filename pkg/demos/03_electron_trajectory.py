"""
Electron trajectories in an oscillating quadrupole
==================================================

Integrate single electrons, read the secular frequency off the trajectory
spectrum, map stability and check whether an ion's Coulomb field matters.
"""

import numpy as np

from trapforge.drive import DriveConfig, amplitude_for_q, secular_frequency
from trapforge.dynamics import (
    FieldModel, coulomb_significance, electron, extract_secular, integrate, scan_stability,
)

r0, Omega = 1e-3, 2 * np.pi * 100e6
T = 2 * np.pi / Omega

for q in (0.1, 0.2, 0.4):
    field = FieldModel.quadrupole(DriveConfig(amplitude_for_q(q, Omega, r0), Omega), r0)
    tr = integrate([electron((1e-5, 0, 0))], field, 2000 * T, T / 100)[0]
    w = extract_secular(tr, "x")
    print(f"q = {q}: bounded {tr.bounded}, secular {w / 2 / np.pi / 1e6:.4f} MHz, "
          f"first-order estimate {secular_frequency(q, Omega) / 2 / np.pi / 1e6:.4f} MHz")

# stability along q_e with no ion tone; the edge sits near 0.908
q_grid = np.round(np.arange(0.80, 1.00, 0.05), 2)
M = scan_stability(DriveConfig(1.0, Omega), r0, q_grid, [0.0], periods=500)
print(dict(zip(q_grid.tolist(), M[:, 0].tolist())))

# electron circling a Ca2+ ion at 10 meV: trajectory change with and without Coulomb
omega_sec = 2 * np.pi * 7.3e6
field = FieldModel.quadrupole(
    DriveConfig(amplitude_for_q(2 * np.sqrt(2) * omega_sec / Omega, Omega, r0), Omega), r0
)
print(f"relative divergence at 10 meV: {coulomb_significance(0.010, field):.3f}")
