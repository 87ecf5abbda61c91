"""
Two-frequency drive
===================

Stability parameters, secular frequencies and parametric resonances of an
electron drive combined with a slow ion tone.
"""

import numpy as np

from trapforge.drive import DriveConfig, parametric_resonances, validate_two_freq

r0 = 1.8e-3
drive = DriveConfig(V_e0=88.0, Omega_e=2 * np.pi * 2.37e9, V_I0=0.1, Omega_I=2 * np.pi * 200e6)

report = validate_two_freq(drive, r0)
for key, value in report.as_items():
    print(f"{key:>14} = {value}")
for w in report.warnings:
    print("warning:", w)

# resonant drive frequencies fall as 1/sqrt(n)
tab = parametric_resonances(drive.V_e0, r0, 10)
print("n, Omega_res / 2 pi [GHz], Omega_res sqrt(n) / Omega_res(1)")
for n, w in tab:
    print(f"{int(n):2d}  {w / (2 * np.pi) / 1e9:8.4f}  {w * np.sqrt(n) / tab[0, 1]:.15f}")

# an ion tone ten times louder than the electron tone breaks the ordering
loud = DriveConfig(V_e0=8.0, Omega_e=drive.Omega_e, V_I0=80.0, Omega_I=2 * np.pi * 20e6)
print(validate_two_freq(loud, r0).warnings)
