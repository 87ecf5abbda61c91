"""Regenerate the frozen oracle tables used by the test-suite.

    python tests/oracles/freeze.py

Slow (about a minute); the outputs are committed next to this file.
"""

from pathlib import Path

import numpy as np

from numerov import NumerovOracle

HERE = Path(__file__).parent


def main():
    levels = NumerovOracle(2.0, 1e-4, 2500.0, dx=1e-4).levels(50, -3.0, 0.05)
    np.savetxt(
        HERE / "numerov_z2_w1e-4.txt",
        levels,
        fmt="%.17e",
        header="Numerov shooting, Z=2, omega=1e-4 au, l=0, r_max=2500 bohr, dx=1e-4; lowest 50 levels [hartree]",
    )


if __name__ == "__main__":
    main()
