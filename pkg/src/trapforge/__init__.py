"""Two-frequency Paul trap toolkit for electrons and ions.

Ring-trap geometry, drive stability, classical trajectories, quantum
spectra of the Coulomb plus harmonic radial problem, and noise budgets.
"""

__version__ = "0.1.0"

from .drive import DriveConfig, StabilityReport, stability_params, validate_two_freq  # noqa: E402
from .geometry import RingGeometry, optimize_ratio, pseudopotential_profile  # noqa: E402
from .noise import TrapModelPreset, budget, get_preset, load_presets  # noqa: E402
from .quantum import RadialProblem, SplineBasis, eigenlevels, spacing_profile  # noqa: E402
from .units import CONSTANTS, Quantity  # noqa: E402

__all__ = [
    "__version__",
    "CONSTANTS",
    "Quantity",
    "DriveConfig",
    "StabilityReport",
    "stability_params",
    "validate_two_freq",
    "RingGeometry",
    "optimize_ratio",
    "pseudopotential_profile",
    "TrapModelPreset",
    "budget",
    "get_preset",
    "load_presets",
    "RadialProblem",
    "SplineBasis",
    "eigenlevels",
    "spacing_profile",
]
