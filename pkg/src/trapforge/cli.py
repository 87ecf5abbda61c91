"""``trapforge`` command line: one subcommand per analysis, CSV out.

    trapforge <geometry|stability|dynamics|spectrum|noise> --config FILE [--out DIR] [--table2]

Exit status is 0 on success. On failure a single line
``error[<category>]: <message>`` goes to stderr and the status is 2.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, config_hash, parse_config_text
from .reports import ReportWriter
from .units import CONSTANTS

__all__ = ["main", "build_parser"]

COULOMB_THRESHOLD = 0.1
COMMANDS = ("geometry", "stability", "dynamics", "spectrum", "noise")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trapforge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"trapforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, type=Path)
        s.add_argument("--out", type=Path, default=None,
                       help="output directory (overrides [output] directory)")
        if name == "noise":
            s.add_argument("--table2", action="store_true",
                           help="emit the three built-in trap models side by side")
    return p


def _need(cfg, section, command):
    obj = getattr(cfg, section)
    if obj is None:
        raise ConfigError(f"{command} needs a [{section}] section", field=section)
    return obj


# --- geometry ---------------------------------------------------------------

def cmd_geometry(cfg, out: ReportWriter):
    from .dynamics import electron
    from .geometry import RingGeometry, escape_height, optimize_ratio, pseudopotential_profile

    g = _need(cfg, "geometry", "geometry")
    h = g.height()
    if g.mode == "optimize":
        metrics = ("steepness", "depth") if g.metric == "both" else (g.metric,)
        rows = []
        for m in metrics:
            r = optimize_ratio(m, (g.search_min, g.search_max))
            best = RingGeometry.from_height(h, r)
            rows.append((m, r, best.inner_radius, best.outer_radius, h))
        out.csv("optimize.csv", ["metric", "ratio", "a", "b", "h"], ["", "", "m", "m", "m"], rows)
        return

    geom = g.ring()
    h = geom.height
    d = _need(cfg, "drive", "geometry profile")
    z = np.linspace(0.0, g.z_extent * geom.outer_radius, g.z_points)
    prof = pseudopotential_profile(geom, d.V_e0, d.Omega_e, electron(), z)
    out.csv(
        "profile.csv",
        ["z", "pseudopotential", "pseudopotential_K"],
        ["m", "J", "K"],
        zip(z, prof.pseudopotential, prof.pseudopotential_K),
    )
    out.keyvalue(
        "profile_summary.txt",
        [
            ("a_m", geom.inner_radius),
            ("b_m", geom.outer_radius),
            ("ratio", geom.ratio),
            ("h_m", h),
            ("h_numeric_m", prof.field_null_height),
            ("z_max_m", prof.turning_point),
            ("z_max_closed_form_m", escape_height(geom)),
            ("depth_K", prof.depth_K),
            ("steepness_J_per_m", prof.steepness),
            ("axial_secular_rad_s", prof.secular_frequency),
        ],
    )


# --- stability --------------------------------------------------------------

def cmd_stability(cfg, out: ReportWriter):
    from .drive import parametric_resonances, validate_two_freq

    d = _need(cfg, "drive", "stability")
    r0 = cfg.r0()
    drive = d.config()
    rep = validate_two_freq(
        drive, r0,
        amplitude_ratio_min=d.amplitude_ratio_min,
        frequency_ratio_min=d.frequency_ratio_min,
        resonance_margin=d.resonance_margin,
        n_max=d.n_max,
    )
    items = [("r0_m", r0)] + rep.as_items()
    items += [(f"warning_{i}", w) for i, w in enumerate(rep.warnings)]
    out.keyvalue("stability.txt", items)
    rows = []
    for name, V0 in (("e", drive.V_e0), ("I", drive.V_I0)):
        if V0 > 0:
            for n, w in parametric_resonances(V0, r0, d.n_max):
                rows.append((name, int(n), w, abs(drive.Omega_e - w) / w,
                             abs(drive.Omega_I - w) / w))
    out.csv("resonances.csv", ["tone", "n", "omega_res", "margin_e", "margin_I"],
            ["", "", "rad/s", "", ""], rows)
    n = np.arange(-2, 3)
    out.csv("sidebands.csv", ["n", "gamma_e", "gamma_I"], ["", "rad/s", "rad/s"],
            zip(n, rep.sidebands_e, rep.sidebands_I))


# --- dynamics ---------------------------------------------------------------

def _field(cfg):
    from .dynamics import FieldModel

    dyn = cfg.dynamics
    drive = cfg.drive.config()
    if dyn.field_model == "ring_axis":
        return FieldModel.ring_axis(_need(cfg, "geometry", "ring_axis dynamics").ring(), drive,
                                    coulomb=dyn.coulomb)
    return FieldModel.quadrupole(drive, cfg.r0(), coulomb=dyn.coulomb)


def cmd_dynamics(cfg, out: ReportWriter):
    from .dynamics import coulomb_significance, extract_secular, integrate, scan_stability

    dyn = _need(cfg, "dynamics", "dynamics")
    _need(cfg, "drive", "dynamics")
    field = _field(cfg)
    drive = field.drive
    tones = [w for V, w in ((drive.V_e0, drive.Omega_e), (drive.V_I0, drive.Omega_I)) if V > 0]
    slow = min(tones) if tones else drive.Omega_e
    t_end = dyn.periods * 2.0 * math.pi / slow
    dt = 2.0 * math.pi / drive.fastest_omega / dyn.steps_per_period

    summary = [("field_model", dyn.field_model), ("t_end_s", t_end), ("dt_s", dt),
               ("coulomb", dyn.coulomb)]
    if cfg.species:
        states = [s.state() for s in cfg.species]
        trajs = integrate(states, field, t_end, dt, dyn.escape_radius)
        for i, tr in enumerate(trajs):
            name = tr.label or f"particle{i}"
            rows = tr.to_rows()[:: dyn.record_every]
            out.csv(f"trajectory_{i}_{re.sub(r'[^A-Za-z0-9_.-]', '_', name)}.csv", ["t", "x", "y", "z", "vx", "vy", "vz"],
                    ["s", "m", "m", "m", "m/s", "m/s", "m/s"], rows)
            summary += [(f"{name}.bounded", tr.bounded),
                        (f"{name}.escape_time_s", tr.escape_time)]
            for axis in "xyz":
                if not tones:
                    summary.append((f"{name}.secular_{axis}_rad_s", "n/a (no drive)"))
                    continue
                try:
                    w = extract_secular(tr, axis)
                except ValueError as exc:
                    w = f"n/a ({exc})"
                summary.append((f"{name}.secular_{axis}_rad_s", w))
    if dyn.scan_q_e:
        q_I = dyn.scan_q_I or (0.0,)
        M = scan_stability(drive, cfg.r0(), dyn.scan_q_e, q_I, dyn.scan_periods)
        rows = [(qe, qi, M[i, j]) for i, qe in enumerate(dyn.scan_q_e) for j, qi in enumerate(q_I)]
        out.csv("stability_scan.csv", ["q_e", "q_I", "bounded"], ["", "", ""], rows)
    if dyn.coulomb_energy is not None:
        energy_eV = dyn.coulomb_energy / CONSTANTS.elementary_charge
        div = coulomb_significance(energy_eV, field, secular_periods=dyn.coulomb_periods, dt=dt)
        out.keyvalue("coulomb.txt", [("electron_energy_eV", energy_eV),
                                     ("secular_periods", dyn.coulomb_periods),
                                     ("relative_divergence", div),
                                     ("significant", div >= COULOMB_THRESHOLD)])
    out.keyvalue("dynamics_summary.txt", summary)


# --- spectrum ---------------------------------------------------------------

def cmd_spectrum(cfg, out: ReportWriter):
    from .quantum import (
        RadialProblem, SplineBasis, classify_regions, eigenlevels, omega_from_drive, region_radii,
        spacing_profile, suggest_box_radius, tuning_curve,
    )
    q = _need(cfg, "quantum", "spectrum")
    if q.derive_from_drive:
        omega = omega_from_drive(cfg.drive.config(), cfg.r0(), atomic_units=True)
    else:
        omega = q.omega * CONSTANTS.au_time
    R = (q.box_radius / CONSTANTS.bohr_radius if q.box_radius is not None
         else suggest_box_radius(q.Z, omega, q.levels))
    problem = RadialProblem(q.Z, omega, q.ell, R, SplineBasis(q.order, q.count))
    ladder = eigenlevels(problem, q.levels)
    meta = (("Z", q.Z), ("omega_au", omega), ("ell", q.ell), ("box_radius_bohr", R),
            ("basis", f"order {q.order}, {q.count} splines, mixed knots"),
            ("converged_levels", f"{ladder.converged_count} of {ladder.requested}"))
    hartree_eV = CONSTANTS.hartree_energy / CONSTANTS.elementary_charge
    idx = np.arange(0, len(ladder), q.every)
    out.csv("levels.csv", ["index", "energy_hartree", "energy_eV", "converged"],
            ["", "hartree", "eV", ""],
            [(i, ladder.energies[i], ladder.energies[i] * hartree_eV,
              i < ladder.converged_count) for i in idx], meta)
    if len(ladder) >= 3:
        prof = spacing_profile(ladder)
        out.csv("spacing.csv", ["index", "spacing_hartree", "spacing_over_2omega"],
                ["", "hartree", ""],
                [(i, s, s / (2 * omega) if omega > 0 else float("nan"))
                 for i, s in zip(prof.index, prof.spacing)],
                meta + (("interior_minimum_index", prof.min_index),))
    if q.Z > 0 and omega > 0:
        r_low, r_high = region_radii(q.Z, omega)
        V_low, V_high = classify_regions(q.Z, omega)
        out.keyvalue("regions.txt", [("r_low_bohr", r_low), ("r_high_bohr", r_high),
                                     ("V_low_hartree", V_low), ("V_high_hartree", V_high)],
                     meta)
    if q.tuning_voltages:
        V_ref = q.tuning_reference if q.tuning_reference is not None else cfg.drive.V_e0
        kw = {}
        if q.derive_from_drive:
            kw = dict(drive=cfg.drive.config(), r0=cfg.r0())
        curve = tuning_curve(problem, q.tuning_state, q.tuning_voltages, V_ref, **kw)
        out.csv("tuning.csv", ["V", "relative_transition_energy"], ["V", ""], curve,
                meta + (("state_index", q.tuning_state), ("V_ref", V_ref)))


# --- noise ------------------------------------------------------------------

def _budget_row(b):
    from .noise import TABLE_UNITS

    row = [b.model.name]
    row += [b[s].S_E / TABLE_UNITS[s] for s in ("BBS", "JN", "SAd", "SR")]
    row.append(b.total_S_E / TABLE_UNITS["Total"])
    row += [b[s].rate for s in ("BBS", "JN", "SAd", "SR")] + [b.total_rate]
    row += [b.total_temperature_rate]
    return row


BUDGET_COLUMNS = ["model", "BBS", "JN", "SAd", "SR", "Total",
                  "rate_BBS", "rate_JN", "rate_SAd", "rate_SR", "rate_total", "Tdot_total"]
BUDGET_UNITS = ["", "1e-20 V2/m2*s", "1e-17 V2/m2*s", "1e-19 V2/m2*s", "1e-30 V2/m2*s",
                "1e-17 V2/m2*s", "quanta/s", "quanta/s", "quanta/s", "quanta/s", "quanta/s",
                "K/s"]


def cmd_noise(cfg, out: ReportWriter, table2=False):
    from .noise import budget, get_preset, load_presets

    if table2:
        models = list(load_presets().values())
    else:
        n = _need(cfg, "noise", "noise")
        models = [get_preset(n.preset) if n.preset else n.custom]
    out.csv("noise_budget.csv", BUDGET_COLUMNS, BUDGET_UNITS,
            [_budget_row(budget(m)) for m in models])


def _category(exc) -> str:
    from .dynamics import IntegrationError
    from .quantum import ConvergenceError

    if isinstance(exc, ConfigError):
        return exc.category
    if isinstance(exc, ConvergenceError):
        return "convergence"
    if isinstance(exc, IntegrationError):
        return "integration"
    if isinstance(exc, KeyError):
        return "preset"
    if isinstance(exc, OSError):
        return "io"
    return "domain"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}", category="io")
        cfg = parse_config_text(text, source=args.config)
        out_dir = args.out if args.out is not None else Path(cfg.output.directory)
        out = ReportWriter(out_dir, args.command, __version__, config_hash(text))
        if args.command == "noise":
            cmd_noise(cfg, out, table2=args.table2)
        else:
            globals()[f"cmd_{args.command}"](cfg, out)
    except (ValueError, RuntimeError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        msg = " ".join(str(msg).split())
        print(f"error[{_category(exc)}]: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
