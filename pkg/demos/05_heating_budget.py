"""
Electron heating budget
=======================

Field-noise spectral densities, heating rates and background-gas collisions
for the three built-in trap models.
"""

import numpy as np

from trapforge.noise import (
    TABLE_UNITS, budget, collision_rate, combined_cryogenic_rate, load_presets,
)

for name, model in load_presets().items():
    b = budget(model)
    cols = "  ".join(f"{e.source} {e.S_E / TABLE_UNITS[e.source]:8.4g}" for e in b.entries)
    print(f"{name:>12}: {cols}  Total {b.total_S_E / TABLE_UNITS['Total']:.4g}")
    print(f"{'':>12}  rate {b.total_rate:.4g} quanta/s, {b.total_temperature_rate:.4g} K/s")

cold = load_presets()["copper-0.4K"]
print(f"combined rate at 0.4 K: {combined_cryogenic_rate(cold):.3f} quanta/s")

# one helium collision every ~30 s at 2.5e-8 Pa and room temperature
print(f"collision interval: {1 / collision_rate(2.5e-8, 300.0):.1f} s")
