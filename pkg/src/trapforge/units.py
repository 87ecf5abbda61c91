"""Physical constants and SI <-> atomic-unit conversions.

Constant values are CODATA 2018. Quantum-solver internals run in Hartree
atomic units; everything else in the package is SI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "Quantity",
    "si_to_au",
    "au_to_si",
    "skin_depth",
    "DIMENSIONS",
    "UnitError",
    "parse_quantity",
    "format_quantity",
    "CANONICAL_UNITS",
]


@dataclass(frozen=True)
class PhysicalConstants:
    electron_mass: float = 9.1093837015e-31  # kg
    elementary_charge: float = 1.602176634e-19  # C
    reduced_planck: float = 1.054571817e-34  # J s
    boltzmann: float = 1.380649e-23  # J/K
    vacuum_permeability: float = 1.25663706212e-6  # H/m
    vacuum_permittivity: float = 8.8541878128e-12  # F/m
    atomic_mass_unit: float = 1.66053906660e-27  # kg
    hartree_energy: float = 4.3597447222071e-18  # J
    bohr_radius: float = 5.29177210903e-11  # m
    au_time: float = 2.4188843265857e-17  # s

    @property
    def planck(self) -> float:
        return 2.0 * math.pi * self.reduced_planck

    @property
    def coulomb_constant(self) -> float:
        return 1.0 / (4.0 * math.pi * self.vacuum_permittivity)


CONSTANTS = PhysicalConstants()

DIMENSIONS = (
    "length",
    "time",
    "frequency",
    "angular-frequency",
    "energy",
    "temperature",
    "voltage",
    "resistivity",
    "spectral-density",
    "rate",
    "resistance",
    "pressure",
    "area",
    "mass",
    "angle",
    "dimensionless",
)

# SI value of one atomic unit, per supported dimension
_AU_IN_SI = {
    "length": CONSTANTS.bohr_radius,
    "energy": CONSTANTS.hartree_energy,
    "time": CONSTANTS.au_time,
    "angular-frequency": 1.0 / CONSTANTS.au_time,
}


@dataclass(frozen=True)
class Quantity:
    """A scalar (or array) value tagged with its physical dimension."""

    value: float
    dimension: str

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {self.dimension!r}")


def si_to_au(q: Quantity) -> Quantity:
    """Convert an SI quantity to Hartree atomic units.

    Only length, time, energy and angular frequency have an atomic-unit
    counterpart here; anything else raises ``ValueError``.
    """
    try:
        scale = _AU_IN_SI[q.dimension]
    except KeyError:
        raise ValueError(
            f"no atomic-unit conversion for dimension {q.dimension!r}"
        ) from None
    return Quantity(q.value / scale, q.dimension)


def au_to_si(q: Quantity) -> Quantity:
    """Inverse of :func:`si_to_au`."""
    try:
        scale = _AU_IN_SI[q.dimension]
    except KeyError:
        raise ValueError(
            f"no atomic-unit conversion for dimension {q.dimension!r}"
        ) from None
    return Quantity(q.value * scale, q.dimension)


def skin_depth(resistivity, angular_frequency):
    """Electromagnetic skin depth sqrt(2 rho / (mu0 omega)) in metres."""
    rho = np.asarray(resistivity, dtype=float)
    omega = np.asarray(angular_frequency, dtype=float)
    if np.any(rho <= 0) or np.any(omega <= 0):
        raise ValueError("skin_depth needs positive resistivity and angular frequency")
    out = np.sqrt(2.0 * rho / (CONSTANTS.vacuum_permeability * omega))
    return float(out) if out.ndim == 0 else out


class UnitError(ValueError):
    pass


_TWO_PI = 2.0 * math.pi
_HZ = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}

# unit suffix -> SI multiplier, per dimension
_UNITS = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9,
               "bohr": CONSTANTS.bohr_radius},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9},
    "frequency": dict(_HZ),
    # Hz-family units are cycle frequencies and pick up the 2*pi here
    "angular-frequency": {"rad/s": 1.0, "au": 1.0 / CONSTANTS.au_time,
                          **{k: _TWO_PI * v for k, v in _HZ.items()}},
    "energy": {"J": 1.0, "eV": CONSTANTS.elementary_charge,
               "meV": 1e-3 * CONSTANTS.elementary_charge, "hartree": CONSTANTS.hartree_energy},
    "temperature": {"K": 1.0, "mK": 1e-3},
    "voltage": {"V": 1.0, "mV": 1e-3, "kV": 1e3},
    "resistivity": {"ohm*m": 1.0, "ohm*cm": 1e-2},
    "resistance": {"ohm": 1.0, "mohm": 1e-3},
    "spectral-density": {"V2/m2*s": 1.0},
    "rate": {"1/s": 1.0},
    "pressure": {"Pa": 1.0, "mbar": 100.0},
    "area": {"m2": 1.0, "cm2": 1e-4},
    "mass": {"kg": 1.0, "u": CONSTANTS.atomic_mass_unit, "me": CONSTANTS.electron_mass},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "dimensionless": {"": 1.0},
}

CANONICAL_UNITS = {
    "length": "m", "time": "s", "frequency": "Hz", "angular-frequency": "rad/s",
    "energy": "J", "temperature": "K", "voltage": "V", "resistivity": "ohm*m",
    "resistance": "ohm", "spectral-density": "V2/m2*s", "rate": "1/s", "pressure": "Pa",
    "area": "m2", "mass": "kg", "angle": "rad", "dimensionless": "",
}


def parse_quantity(text: str, dimension: str) -> float:
    """Parse ``"<number> <unit>"`` into an SI float.

    Physical dimensions require an explicit unit from the table for that
    dimension; ``dimensionless`` accepts a bare number only.
    """
    if dimension not in _UNITS:
        raise ValueError(f"unknown dimension {dimension!r}")
    parts = text.strip().split(None, 1)
    if not parts:
        raise UnitError("empty value")
    try:
        value = float(parts[0])
    except ValueError:
        raise UnitError(f"not a number: {parts[0]!r}") from None
    unit = parts[1].strip() if len(parts) > 1 else ""
    table = _UNITS[dimension]
    if unit not in table:
        if not unit:
            raise UnitError(f"missing unit for {dimension} value {text.strip()!r}")
        raise UnitError(
            f"unknown unit {unit!r} for {dimension}; expected one of {sorted(table)}"
        )
    return value * table[unit]


def format_quantity(value: float, dimension: str) -> str:
    """Canonical SI text form; ``parse_quantity`` inverts it exactly."""
    unit = CANONICAL_UNITS[dimension]
    return f"{value!r} {unit}".rstrip()
