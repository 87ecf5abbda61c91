"""Electric-field noise, heating rates and background-gas collisions.

Spectral densities S_E are in V^2 m^-2 s (single-sided, per unit angular
frequency as used in the heating-rate formula below). Rates are for an
electron.
"""

from __future__ import annotations

import configparser
import math
import warnings
from dataclasses import dataclass, fields
from importlib import resources

from .units import CONSTANTS, parse_quantity, skin_depth

__all__ = [
    "TrapModelPreset",
    "NoiseBudget",
    "NoiseEntry",
    "ThermalRegimeWarning",
    "s_bbs",
    "s_jn",
    "ground_state_heating_rate",
    "scaled_heating_rate",
    "temperature_rate",
    "budget",
    "combined_cryogenic_rate",
    "collision_rate",
    "cross_section_for_interval",
    "load_presets",
    "get_preset",
    "preset_from_mapping",
    "HELIUM_CROSS_SECTION",
    "HELIUM_MASS",
    "TABLE_UNITS",
]

HELIUM_MASS = 4.002602 * CONSTANTS.atomic_mass_unit
# low-energy e-He total cross section; the 4-7e-20 m^2 band of thermal data
HELIUM_CROSS_SECTION = 5.0e-20
THERMAL_RATIO_MIN = 100.0

# reporting scale of each budget column
TABLE_UNITS = {"BBS": 1e-20, "JN": 1e-17, "SAd": 1e-19, "SR": 1e-30, "Total": 1e-17}
SOURCES = ("BBS", "JN", "SAd", "SR")


class ThermalRegimeWarning(UserWarning):
    """k_B T is not much larger than hbar omega; the classical BBS form is doubtful."""


def _positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise ValueError(f"{k} must be positive, got {v!r}")


def s_bbs(T_e, rho_e, d, omega, s_eta=2.0):
    """Near-field black-body noise of a resistive electrode surface.

    S = k_B T rho / (2 pi d^3) * (s_eta + d / delta_s), with delta_s the skin
    depth at ``omega``. Emits :class:`ThermalRegimeWarning` when
    k_B T / (hbar omega) < 100.
    """
    _positive(T_e=T_e, rho_e=rho_e, d=d, omega=omega, s_eta=s_eta)
    ratio = CONSTANTS.boltzmann * T_e / (CONSTANTS.reduced_planck * omega)
    if ratio < THERMAL_RATIO_MIN:
        warnings.warn(
            f"k_B T / (hbar omega) = {ratio:.3g} < {THERMAL_RATIO_MIN:g}",
            ThermalRegimeWarning,
            stacklevel=2,
        )
    delta = skin_depth(rho_e, omega)
    return CONSTANTS.boltzmann * T_e * rho_e / (2.0 * math.pi * d**3) * (s_eta + d / delta)


def s_jn(T_c, R, d):
    """Johnson-Nyquist noise 4 k_B T R / d^2; ``R = 0`` gives 0."""
    _positive(T_c=T_c, d=d)
    if R < 0:
        raise ValueError("R must be non-negative")
    return 4.0 * CONSTANTS.boltzmann * T_c * R / d**2


def ground_state_heating_rate(S_E, omega):
    """Gamma_0 = e^2 S_E / (4 m_e hbar omega) in quanta/s."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    if S_E < 0:
        raise ValueError("S_E must be non-negative")
    e, m, hbar = CONSTANTS.elementary_charge, CONSTANTS.electron_mass, CONSTANTS.reduced_planck
    return e * e * S_E / (4.0 * m * hbar * omega)


def scaled_heating_rate(S_E, omega, n_bar):
    """Rate out of a state with mean occupation ``n_bar``: 2 n_bar Gamma_0."""
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    return 2.0 * n_bar * ground_state_heating_rate(S_E, omega)


def temperature_rate(rate, omega):
    """Convert quanta/s to K/s at oscillator frequency ``omega``."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    return rate * CONSTANTS.reduced_planck * omega / CONSTANTS.boltzmann


@dataclass(frozen=True)
class TrapModelPreset:
    name: str
    electrode_temperature: float  # K
    resistivity: float  # ohm m
    circuit_resistance: float  # ohm, at omega
    height: float  # m
    omega: float  # rad/s
    s_adatom: float  # V^2 m^-2 s
    s_roughness: float  # V^2 m^-2 s
    surface_fluct: float = 2.0
    circuit_temperature: float | None = None  # defaults to the electrode temperature

    def __post_init__(self):
        _positive(
            electrode_temperature=self.electrode_temperature,
            resistivity=self.resistivity,
            height=self.height,
            omega=self.omega,
        )
        if self.circuit_temperature is None:
            object.__setattr__(self, "circuit_temperature", self.electrode_temperature)
        _positive(circuit_temperature=self.circuit_temperature)
        for k in ("circuit_resistance", "s_adatom", "s_roughness"):
            if getattr(self, k) < 0:
                raise ValueError(f"{k} must be non-negative")
        if self.surface_fluct not in (0.5, 1.0, 2.0):
            raise ValueError("surface_fluct must be 0.5, 1 or 2")


@dataclass(frozen=True)
class NoiseEntry:
    source: str
    S_E: float
    rate: float  # quanta/s
    temperature_rate: float  # K/s


@dataclass
class NoiseBudget:
    model: TrapModelPreset
    entries: list[NoiseEntry]

    def __getitem__(self, source) -> NoiseEntry:
        for e in self.entries:
            if e.source == source:
                return e
        raise KeyError(source)

    @property
    def total_S_E(self) -> float:
        return math.fsum(e.S_E for e in self.entries)

    @property
    def total_rate(self) -> float:
        return math.fsum(e.rate for e in self.entries)

    @property
    def total_temperature_rate(self) -> float:
        return math.fsum(e.temperature_rate for e in self.entries)


def budget(model: TrapModelPreset) -> NoiseBudget:
    """Per-source spectral densities and electron heating rates for one trap model."""
    S = {
        "BBS": s_bbs(
            model.electrode_temperature, model.resistivity, model.height, model.omega,
            model.surface_fluct,
        ),
        "JN": s_jn(model.circuit_temperature, model.circuit_resistance, model.height),
        "SAd": model.s_adatom,
        "SR": model.s_roughness,
    }
    entries = []
    for src in SOURCES:
        g = ground_state_heating_rate(S[src], model.omega)
        entries.append(NoiseEntry(src, S[src], g, temperature_rate(g, model.omega)))
    return NoiseBudget(model, entries)


def combined_cryogenic_rate(model: TrapModelPreset) -> float:
    """Ground-state heating rate from all four sources together."""
    return ground_state_heating_rate(budget(model).total_S_E, model.omega)


def collision_rate(pressure, gas_temperature, gas_mass=HELIUM_MASS, cross_section=HELIUM_CROSS_SECTION):
    """Electron-gas momentum-transfer rate n sigma v_mean [1/s].

    The gas density is P / (k_B T) and the speed is the electron's mean
    thermal speed at the gas temperature; ``gas_mass`` is kept for the
    record but does not enter.
    """
    _positive(pressure=pressure, gas_temperature=gas_temperature, gas_mass=gas_mass)
    if cross_section < 0:
        raise ValueError("cross_section must be non-negative")
    kT = CONSTANTS.boltzmann * gas_temperature
    v_mean = math.sqrt(8.0 * kT / (math.pi * CONSTANTS.electron_mass))
    return pressure / kT * cross_section * v_mean


def cross_section_for_interval(interval, pressure, gas_temperature):
    """Cross section that gives one collision per ``interval`` seconds."""
    _positive(interval=interval)
    return 1.0 / (interval * collision_rate(pressure, gas_temperature, HELIUM_MASS, 1.0))


_PRESET_FIELDS = {
    "electrode_temperature": "temperature",
    "circuit_temperature": "temperature",
    "resistivity": "resistivity",
    "circuit_resistance": "resistance",
    "height": "length",
    "omega": "angular-frequency",
    "s_adatom": "spectral-density",
    "s_roughness": "spectral-density",
    "surface_fluct": "dimensionless",
}


def preset_from_mapping(name: str, mapping) -> TrapModelPreset:
    """Build a preset from unit-suffixed strings, e.g. one INI section."""
    unknown = set(mapping) - set(_PRESET_FIELDS)
    if unknown:
        raise ValueError(f"preset {name!r}: unknown field(s) {sorted(unknown)}")
    values = {}
    for key, dim in _PRESET_FIELDS.items():
        if key in mapping:
            try:
                values[key] = parse_quantity(mapping[key], dim)
            except ValueError as exc:
                raise ValueError(f"preset {name!r}, field {key!r}: {exc}") from None
    required = {f.name for f in fields(TrapModelPreset) if f.name != "name"} - {
        "surface_fluct", "circuit_temperature",
    }
    missing = required - set(values)
    if missing:
        raise ValueError(f"preset {name!r}: missing field(s) {sorted(missing)}")
    return TrapModelPreset(name=name, **values)


def load_presets() -> dict[str, TrapModelPreset]:
    """Built-in trap models keyed by name, in file order."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string(
        resources.files("trapforge").joinpath("data/presets.ini").read_text(encoding="utf-8")
    )
    return {name: preset_from_mapping(name, parser[name]) for name in parser.sections()}


def get_preset(name: str) -> TrapModelPreset:
    presets = load_presets()
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(presets)}")
    return presets[name]
