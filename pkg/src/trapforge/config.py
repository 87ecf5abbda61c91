"""Run configuration: an INI file whose physical values carry unit suffixes.

Every section maps onto a small dataclass. Values are stored in SI after
parsing, and :func:`emit_config` writes them back in canonical SI form so
that ``parse_config(emit_config(cfg)) == cfg``.

Example::

    [geometry]
    a = 1.3 mm
    b = 5.7 mm

    [drive]
    V_e0 = 88 V
    Omega_e = 2.37 GHz
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

from .units import UnitError, format_quantity, parse_quantity

__all__ = [
    "ConfigError",
    "RunConfig",
    "GeometrySection",
    "DriveSection",
    "SpeciesEntry",
    "DynamicsSection",
    "QuantumSection",
    "NoiseSection",
    "OutputSection",
    "parse_config",
    "parse_config_text",
    "emit_config",
    "config_hash",
]


class ConfigError(ValueError):
    """Invalid configuration; ``category`` is a short machine-readable tag."""

    def __init__(self, message, category="config", line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.category = category
        self.line = line
        self.field = field


def _q(dim, default=None):
    return field(default=default, metadata={"kind": dim})


def _k(kind, default=None):
    return field(default=default, metadata={"kind": kind})


@dataclass(frozen=True)
class GeometrySection:
    a: float | None = _q("length")
    b: float | None = _q("length")
    h: float | None = _q("length")
    r: float | None = _q("dimensionless")
    characteristic_dim: float | None = _q("length")
    mode: str = _k("str", "optimize")
    metric: str = _k("str", "both")
    search_min: float = _q("dimensionless", 1.5)
    search_max: float = _q("dimensionless", 20.0)
    z_points: int = _k("int", 2001)
    z_extent: float = _q("dimensionless", 6.0)

    def height(self):
        if self.h is not None:
            return self.h
        return self.ring().height

    def ring(self):
        from .geometry import RingGeometry

        if self.a is None and self.r is None:
            raise ConfigError("geometry gives only h; add r or a, b for a concrete ring",
                              field="geometry.r")
        if self.a is not None:
            return RingGeometry(self.a, self.b, self.characteristic_dim)
        return RingGeometry.from_height(self.h, self.r, self.characteristic_dim)


@dataclass(frozen=True)
class DriveSection:
    V_e0: float = _q("voltage", 0.0)
    Omega_e: float | None = _q("angular-frequency")
    V_I0: float = _q("voltage", 0.0)
    Omega_I: float = _q("angular-frequency", 1.0)
    phase: float = _q("angle", 0.0)
    r0: float | None = _q("length")
    n_max: int = _k("int", 10)
    resonance_margin: float = _q("dimensionless", 0.05)
    amplitude_ratio_min: float = _q("dimensionless", 10.0)
    frequency_ratio_min: float = _q("dimensionless", 10.0)

    def config(self):
        from .drive import DriveConfig

        return DriveConfig(self.V_e0, self.Omega_e, self.V_I0, self.Omega_I, self.phase)


@dataclass(frozen=True)
class SpeciesEntry:
    label: str = _k("str", "")
    kind: str = _k("str", "electron")
    charge_state: int = _k("int", 1)
    position: tuple = _k("vec:length", (0.0, 0.0, 0.0))
    velocity: tuple = _k("vec:speed", (0.0, 0.0, 0.0))

    def state(self):
        from .dynamics import calcium_ion, electron

        if self.kind == "electron":
            s = electron(self.position, self.velocity)
        else:
            s = calcium_ion(self.charge_state, self.position, self.velocity)
        if self.label:
            s.label = self.label
        return s


@dataclass(frozen=True)
class DynamicsSection:
    field_model: str = _k("str", "quadrupole")
    periods: float = _q("dimensionless", 1000.0)
    steps_per_period: int = _k("int", 200)
    escape_radius: float | None = _q("length")
    coulomb: bool = _k("bool", False)
    record_every: int = _k("int", 1)
    scan_q_e: tuple = _k("list:dimensionless", ())
    scan_q_I: tuple = _k("list:dimensionless", ())
    scan_periods: int = _k("int", 1000)
    coulomb_energy: float | None = _q("energy")
    coulomb_periods: float = _q("dimensionless", 100.0)


@dataclass(frozen=True)
class QuantumSection:
    Z: float = _q("dimensionless", 2.0)
    omega: float | None = _q("angular-frequency")
    derive_from_drive: bool = _k("bool", False)
    ell: int = _k("int", 0)
    order: int = _k("int", 7)
    count: int = _k("int", 200)
    box_radius: float | None = _q("length")
    levels: int = _k("int", 50)
    every: int = _k("int", 50)
    tuning_voltages: tuple = _k("list:voltage", ())
    tuning_reference: float | None = _q("voltage")
    tuning_state: int = _k("int", 0)


@dataclass(frozen=True)
class NoiseSection:
    preset: str | None = _k("str")
    custom: object = None  # inline TrapModelPreset


@dataclass(frozen=True)
class OutputSection:
    directory: str = _k("str", "out")
    formats: str = _k("str", "csv")


@dataclass(frozen=True)
class RunConfig:
    geometry: GeometrySection | None = None
    drive: DriveSection | None = None
    species: tuple = ()
    dynamics: DynamicsSection | None = None
    quantum: QuantumSection | None = None
    noise: NoiseSection | None = None
    output: OutputSection = OutputSection()

    def r0(self):
        """Trap length scale: drive.r0, else the geometry's r0."""
        if self.drive is not None and self.drive.r0 is not None:
            return self.drive.r0
        if self.geometry is not None:
            g = self.geometry
            if g.a is None and g.r is None:
                return g.characteristic_dim or g.h
            return g.ring().r0
        raise ConfigError("need drive.r0 or a geometry section", field="drive.r0")


_SECTIONS = {
    "geometry": GeometrySection,
    "drive": DriveSection,
    "dynamics": DynamicsSection,
    "quantum": QuantumSection,
    "output": OutputSection,
}
_SPECIES_RE = re.compile(r"^species(?:\.(\S+))?$")
_TRUE = {"yes", "true", "on", "1"}
_FALSE = {"no", "false", "off", "0"}


def _locate(lines, section, key=None):
    """1-based line of a section header (or of a key inside it)."""
    in_sec = False
    for i, line in enumerate(lines, 1):
        s = line.strip()
        if s.startswith("["):
            if in_sec and key is not None:
                return None
            in_sec = s == f"[{section}]"
            if in_sec and key is None:
                return i
        elif in_sec and key is not None:
            name = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            if name == key.lower():
                return i
    return None


def _parse_value(kind, text):
    if kind == "str":
        return text.strip()
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise UnitError(f"expected an integer, got {text!r}") from None
    if kind == "bool":
        t = text.strip().lower()
        if t in _TRUE:
            return True
        if t in _FALSE:
            return False
        raise UnitError(f"expected yes/no, got {text!r}")
    if kind.startswith("list:"):
        dim = kind[5:]
        items = [s for s in (p.strip() for p in text.split(",")) if s]
        return tuple(parse_quantity(s, dim) for s in items)
    if kind.startswith("vec:"):
        dim = kind[4:]
        items = [p.strip() for p in text.split(",")]
        if len(items) != 3:
            raise UnitError(f"expected three comma-separated components, got {len(items)}")
        return tuple(_parse_speed(s) if dim == "speed" else parse_quantity(s, dim) for s in items)
    return parse_quantity(text, kind)


def _parse_speed(text):
    parts = text.split(None, 1)
    if len(parts) == 2 and parts[1].strip() == "m/s":
        return float(parts[0])
    raise UnitError(f"velocity components need the unit m/s, got {text!r}")


def _format_value(kind, value):
    if kind == "str":
        return value
    if kind == "int":
        return str(value)
    if kind == "bool":
        return "yes" if value else "no"
    if kind.startswith("list:"):
        return ", ".join(format_quantity(v, kind[5:]) for v in value)
    if kind == "vec:speed":
        return ", ".join(f"{v!r} m/s" for v in value)
    if kind.startswith("vec:"):
        return ", ".join(format_quantity(v, kind[4:]) for v in value)
    return format_quantity(value, kind)


def _build(cls, section, mapping, lines):
    spec = {f.name.lower(): f for f in fields(cls) if "kind" in f.metadata}
    values = {}
    for key, text in mapping.items():
        f = spec.get(key.lower())
        if f is None:
            raise ConfigError(
                f"unknown field {key!r} in [{section}]", line=_locate(lines, section, key),
                field=f"{section}.{key}",
            )
        try:
            values[f.name] = _parse_value(f.metadata["kind"], text)
        except UnitError as exc:
            raise ConfigError(
                str(exc), category="units", line=_locate(lines, section, key),
                field=f"{section}.{key}",
            ) from None
    return cls(**values)


def _check(cfg: RunConfig, lines):
    g = cfg.geometry
    if g is not None:
        ab = (g.a is not None, g.b is not None)
        hr = (g.h is not None, g.r is not None)
        if any(ab) and any(hr):
            raise ConfigError(
                "geometry given both as (a, b) and as (h, r); keep exactly one pair",
                line=_locate(lines, "geometry", "h" if g.h is not None else "r"),
                field="geometry",
            )
        height_only = hr == (True, False) and not any(ab) and g.mode == "optimize"
        if not (all(ab) or all(hr) or height_only):
            raise ConfigError("geometry needs both a and b, or both h and r",
                              line=_locate(lines, "geometry"), field="geometry")
        if g.mode not in ("optimize", "profile"):
            raise ConfigError(f"mode must be optimize or profile, got {g.mode!r}",
                              line=_locate(lines, "geometry", "mode"), field="geometry.mode")
        if g.metric not in ("both", "steepness", "depth"):
            raise ConfigError(f"metric must be both, steepness or depth, got {g.metric!r}",
                              line=_locate(lines, "geometry", "metric"), field="geometry.metric")
        try:
            g.ring() if not height_only else None
        except ValueError as exc:
            raise ConfigError(str(exc), category="domain", field="geometry") from None
        if height_only and not g.h > 0:
            raise ConfigError("h must be positive", category="domain", field="geometry.h")
    d = cfg.drive
    if d is not None:
        if d.Omega_e is None:
            raise ConfigError("drive needs Omega_e", line=_locate(lines, "drive"),
                              field="drive.Omega_e")
        try:
            d.config()
        except ValueError as exc:
            raise ConfigError(str(exc), category="domain", field="drive") from None
    q = cfg.quantum
    if q is not None:
        if (q.omega is not None) == q.derive_from_drive:
            raise ConfigError(
                "quantum needs exactly one of omega or derive_from_drive = yes",
                line=_locate(lines, "quantum"), field="quantum.omega",
            )
        if q.derive_from_drive and d is None:
            raise ConfigError("derive_from_drive needs a [drive] section", field="quantum")
    dyn = cfg.dynamics
    if dyn is not None and dyn.field_model not in ("quadrupole", "ring_axis"):
        raise ConfigError(f"field_model must be quadrupole or ring_axis, got {dyn.field_model!r}",
                          line=_locate(lines, "dynamics", "field_model"),
                          field="dynamics.field_model")
    for s in cfg.species:
        if s.kind not in ("electron", "ion"):
            raise ConfigError(f"species kind must be electron or ion, got {s.kind!r}",
                              field="species.kind")


def parse_config_text(text: str, source="<string>") -> RunConfig:
    from .noise import get_preset, load_presets, preset_from_mapping

    lines = text.splitlines()
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(source))
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate field {exc.option!r} in [{exc.section}]",
                          line=exc.lineno, field=f"{exc.section}.{exc.option}") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", line=exc.lineno,
                          field=exc.section) from None
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], line=getattr(exc, "lineno", None)) from None

    kw = {}
    species = []
    for sec in parser.sections():
        if sec in _SECTIONS:
            kw[sec] = _build(_SECTIONS[sec], sec, parser[sec], lines)
        elif _SPECIES_RE.match(sec):
            species.append(_build(SpeciesEntry, sec, parser[sec], lines))
        elif sec == "noise":
            items = dict(parser[sec])
            if "preset" in items:
                if len(items) > 1:
                    raise ConfigError("give either preset or inline fields in [noise], not both",
                                      line=_locate(lines, "noise"), field="noise")
                name = items["preset"].strip()
                try:
                    get_preset(name)
                except KeyError:
                    raise ConfigError(
                        f"unknown preset {name!r}; available: {', '.join(load_presets())}",
                        category="preset", line=_locate(lines, "noise", "preset"),
                        field="noise.preset",
                    ) from None
                kw["noise"] = NoiseSection(preset=name)
            else:
                name = items.pop("name", "custom").strip()
                try:
                    kw["noise"] = NoiseSection(custom=preset_from_mapping(name, items))
                except ValueError as exc:
                    cat = "units" if "unit" in str(exc) else "config"
                    raise ConfigError(str(exc), category=cat, line=_locate(lines, "noise"),
                                      field="noise") from None
        else:
            raise ConfigError(f"unknown section [{sec}]", line=_locate(lines, sec), field=sec)
    cfg = RunConfig(species=tuple(species), **kw)
    _check(cfg, lines)
    return cfg


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", category="io") from None
    return parse_config_text(text, source=path)


def _emit_section(out, name, obj):
    out.append(f"[{name}]")
    default = type(obj)()
    for f in fields(obj):
        if "kind" not in f.metadata:
            continue
        v = getattr(obj, f.name)
        if v is None or v == getattr(default, f.name):
            continue
        out.append(f"{f.name} = {_format_value(f.metadata['kind'], v)}")
    out.append("")


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form of ``cfg`` (SI units, defaults omitted)."""
    from .noise import _PRESET_FIELDS

    out = []
    for name in ("geometry", "drive", "dynamics", "quantum"):
        obj = getattr(cfg, name)
        if obj is not None:
            _emit_section(out, name, obj)
    for i, s in enumerate(cfg.species):
        _emit_section(out, f"species.{i}", s)
    if cfg.noise is not None:
        out.append("[noise]")
        if cfg.noise.preset is not None:
            out.append(f"preset = {cfg.noise.preset}")
        else:
            p = cfg.noise.custom
            out.append(f"name = {p.name}")
            for key, dim in _PRESET_FIELDS.items():
                out.append(f"{key} = {format_quantity(getattr(p, key), dim)}")
        out.append("")
    if cfg.output != OutputSection():
        _emit_section(out, "output", cfg.output)
    return "\n".join(out)


def config_hash(text: str) -> str:
    import hashlib

    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
