"""Two-frequency rf drive and the stability analytics that go with it.

The trap is driven by

    V(t) = V_e0 cos(Omega_e t) + V_I0 cos(Omega_I t + phi)

on a quadrupole spatial factor U = (x^2 + y^2 - 2 z^2) / (2 r0^2). Both
stability parameters use the electron mass; :func:`q_parameter` is the
species-generic version for ion studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .units import CONSTANTS

__all__ = [
    "DriveConfig",
    "StabilityReport",
    "ResonanceMargin",
    "waveform",
    "quadrupole_factor",
    "q_parameter",
    "stability_params",
    "secular_frequency",
    "sidebands",
    "parametric_resonances",
    "validate_two_freq",
    "amplitude_for_q",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class DriveConfig:
    """Amplitudes [V], angular frequencies [rad/s] and relative phase [rad]."""

    V_e0: float
    Omega_e: float
    V_I0: float = 0.0
    Omega_I: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.V_e0 < 0 or self.V_I0 < 0:
            raise ValueError("drive amplitudes must be non-negative")
        if not (self.Omega_e > 0 and self.Omega_I > 0):
            raise ValueError("drive angular frequencies must be positive")
        if not 0.0 <= self.phase < 2.0 * math.pi:
            raise ValueError("phase must lie in [0, 2*pi)")

    def with_amplitudes(self, V_e0=None, V_I0=None) -> "DriveConfig":
        return DriveConfig(
            self.V_e0 if V_e0 is None else V_e0,
            self.Omega_e,
            self.V_I0 if V_I0 is None else V_I0,
            self.Omega_I,
            self.phase,
        )

    @property
    def fastest_omega(self) -> float:
        return max(self.Omega_e, self.Omega_I)

    @property
    def slowest_omega(self) -> float:
        return min(self.Omega_e, self.Omega_I)


@dataclass(frozen=True)
class ResonanceMargin:
    n: int
    omega_res: float
    margin_e: float  # |Omega_e - omega_res| / omega_res
    margin_I: float


@dataclass
class StabilityReport:
    q_e: float
    q_I: float
    omega_e: float
    sidebands_e: np.ndarray
    sidebands_I: np.ndarray
    resonance_margins: list[ResonanceMargin]
    warnings: list[str] = field(default_factory=list)

    def as_items(self) -> list[tuple[str, object]]:
        """Flat key/value view used by the report writers."""
        return [
            ("q_e", self.q_e),
            ("q_I", self.q_I),
            ("omega_e_rad_s", self.omega_e),
            ("n_resonances", len(self.resonance_margins)),
            ("n_warnings", len(self.warnings)),
        ]


def waveform(drive: DriveConfig, t):
    """Drive voltage V(t) in volts; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    out = drive.V_e0 * np.cos(drive.Omega_e * t) + drive.V_I0 * np.cos(
        drive.Omega_I * t + drive.phase
    )
    return float(out) if out.ndim == 0 else out


def quadrupole_factor(x, y, z, r0):
    """Dimensionless quadrupole shape U = (x^2 + y^2 - 2 z^2) / (2 r0^2)."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    out = (x * x + y * y - 2.0 * z * z) / (2.0 * r0 * r0)
    return float(out) if out.ndim == 0 else out


def q_parameter(mass, charge, V0, Omega, r0):
    """Generic radial Mathieu parameter 2|Q| V0 / (m r0^2 Omega^2).

    Not part of the two-frequency electron model; handy for checking
    whether an ion of given mass stays inside its own stability region.
    """
    return 2.0 * abs(charge) * V0 / (mass * r0 * r0 * Omega * Omega)


def stability_params(drive: DriveConfig, r0: float) -> tuple[float, float]:
    """(q_e, q_I), both evaluated with the electron mass."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    m, e = CONSTANTS.electron_mass, CONSTANTS.elementary_charge
    q_e = 2.0 * e * drive.V_e0 / (m * r0**2 * drive.Omega_e**2)
    q_I = 2.0 * e * drive.V_I0 / (m * r0**2 * drive.Omega_I**2)
    return q_e, q_I


def amplitude_for_q(q: float, Omega: float, r0: float) -> float:
    """Electron-mass inversion of :func:`stability_params` for one tone."""
    m, e = CONSTANTS.electron_mass, CONSTANTS.elementary_charge
    return q * m * r0**2 * Omega**2 / (2.0 * e)


def secular_frequency(q, Omega):
    """Lowest-order secular angular frequency q * Omega / (2 sqrt 2)."""
    if np.any(np.asarray(q) < 0):
        raise ValueError("q must be non-negative")
    return q * Omega / (2.0 * SQRT2)


def sidebands(omega_e: float, Omega: float, n_range) -> np.ndarray:
    """Micromotion sideband frequencies omega_e + n * Omega (signed).

    ``n_range`` is an inclusive ``(n_lo, n_hi)`` pair or any iterable of ints.
    """
    if isinstance(n_range, tuple) and len(n_range) == 2:
        n = np.arange(n_range[0], n_range[1] + 1)
    else:
        n = np.asarray(list(n_range), dtype=int)
    return omega_e + n * Omega


def parametric_resonances(V0: float, r0: float, n_max: int) -> np.ndarray:
    """Rows of (n, Omega_res(n)) for n = 1..n_max.

    Omega_res(n) = sqrt( sqrt(2) e V0 / (r0^2 m_e n) ).
    """
    if V0 <= 0 or r0 <= 0:
        raise ValueError("V0 and r0 must be positive")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    m, e = CONSTANTS.electron_mass, CONSTANTS.elementary_charge
    n = np.arange(1, n_max + 1)
    omega1 = math.sqrt(SQRT2 * e * V0 / (r0 * r0 * m))
    return np.column_stack([n, omega1 / np.sqrt(n)])


def validate_two_freq(
    drive: DriveConfig,
    r0: float,
    *,
    amplitude_ratio_min: float = 10.0,
    frequency_ratio_min: float = 10.0,
    q_max: float = 0.9,
    resonance_margin: float = 0.05,
    n_max: int = 10,
    sideband_orders: tuple[int, int] = (-2, 2),
) -> StabilityReport:
    """Collect q values, secular frequency, sidebands and resonance margins.

    Nothing here raises for a bad drive; problems come back as warnings.
    Resonance proximity is checked against the tables built from each tone's
    own amplitude.
    """
    q_e, q_I = stability_params(drive, r0)
    omega_e = secular_frequency(q_e, drive.Omega_e)
    warnings = []

    if drive.V_I0 > 0 and drive.V_e0 / drive.V_I0 < amplitude_ratio_min:
        warnings.append(
            f"amplitude ordering: V_e0/V_I0 = {drive.V_e0 / drive.V_I0:.3g} "
            f"< {amplitude_ratio_min:g}"
        )
    if drive.Omega_e / drive.Omega_I < frequency_ratio_min:
        warnings.append(
            f"frequency ordering: Omega_e/Omega_I = {drive.Omega_e / drive.Omega_I:.3g} "
            f"< {frequency_ratio_min:g}"
        )
    if q_e > q_max:
        warnings.append(f"instability: q_e = {q_e:.3g} > {q_max:g}")
    if q_I > q_max:
        warnings.append(f"instability: q_I = {q_I:.3g} > {q_max:g}")

    margins = []
    tones = [("e", drive.V_e0, drive.Omega_e), ("I", drive.V_I0, drive.Omega_I)]
    tables = {
        name: parametric_resonances(V0, r0, n_max) for name, V0, _ in tones if V0 > 0
    }
    for name, table in tables.items():
        for n, omega_res in table:
            m_e = abs(drive.Omega_e - omega_res) / omega_res
            m_I = abs(drive.Omega_I - omega_res) / omega_res
            if name == "e":
                margins.append(ResonanceMargin(int(n), float(omega_res), m_e, m_I))
            own = m_e if name == "e" else m_I
            if own < resonance_margin:
                warnings.append(
                    f"resonance: Omega_{name} within {own:.2%} of Omega_res(n={int(n)})"
                )
    return StabilityReport(
        q_e=q_e,
        q_I=q_I,
        omega_e=omega_e,
        sidebands_e=sidebands(omega_e, drive.Omega_e, sideband_orders),
        sidebands_I=sidebands(omega_e, drive.Omega_I, sideband_orders),
        resonance_margins=margins,
        warnings=warnings,
    )
