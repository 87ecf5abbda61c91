"""Acceptance gate: one test and one PASS/FAIL line per criterion."""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from trapforge.cli import main
from trapforge.drive import DriveConfig, amplitude_for_q, parametric_resonances, secular_frequency
from trapforge.dynamics import FieldModel, electron, extract_secular, integrate, scan_stability
from trapforge.geometry import (
    RingGeometry, depth_shape, height_from_radii, optimize_ratio, pseudopotential_profile,
)
from trapforge.noise import (
    budget, collision_rate, combined_cryogenic_rate, cross_section_for_interval, get_preset,
    ground_state_heating_rate, s_bbs, s_jn, temperature_rate, TABLE_UNITS,
)
from trapforge.quantum import (
    RadialProblem, SplineBasis, eigenlevels, spacing_profile, suggest_box_radius, tuning_curve,
)
from trapforge.units import skin_depth

CONFIGS = Path(__file__).parents[1] / "demos" / "configs"
OMEGA_DRIVE = 2 * math.pi * 2.37e9
W73 = 2 * math.pi * 7.3e6


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_1_geometry_optima(verdict):
    (rs, ts) = timed(optimize_ratio, "steepness")
    (rd, td) = timed(optimize_ratio, "depth")
    ok = abs(rs - 4.47) <= 0.01 and abs(rd - 5.49) <= 0.01 and ts < 1 and td < 1
    verdict(1, ok, f"r*_steepness = {rs:.5f}, r*_depth = {rd:.5f} (target 4.47, 5.49 +/- 0.01); "
                   f"runtime {ts:.3f} s, {td:.3f} s (< 1 s)")


def test_criterion_2_geometry_example(verdict, electron_species):
    h = height_from_radii(1.3e-3, 5.7e-3)
    g = RingGeometry(1.3e-3, 5.7e-3)
    z = np.linspace(0, 6 * g.outer_radius, 2001)
    null = pseudopotential_profile(g, 88.0, OMEGA_DRIVE, electron_species, z).field_null_height
    ok = 1.78e-3 <= h <= 1.83e-3 and rel(null, h) <= 1e-9
    verdict(2, ok, f"h = {h * 1e3:.5f} mm in [1.78, 1.83] mm; numeric null vs closed form "
                   f"rel. diff {rel(null, h):.2e} (<= 1e-9)")


def test_criterion_3_depth_shape_law(verdict, electron_species):
    t0 = time.perf_counter()
    h = 1.8e-3

    def depth(r):
        g = RingGeometry.from_height(h, r)
        z = np.linspace(0, 6 * g.outer_radius, 4001)
        return pseudopotential_profile(g, 88.0, OMEGA_DRIVE, electron_species, z).depth

    ref_r = 5.49
    ref = depth(ref_r)
    worst = max(rel(depth(r) / ref, depth_shape(r) / depth_shape(ref_r))
                for r in (3.0, 4.47, 5.49, 8.0))
    dt = time.perf_counter() - t0
    verdict(3, worst <= 0.01 and dt < 10,
            f"worst depth-ratio deviation from shape law {worst:.2e} (<= 1e-2); runtime {dt:.2f} s")


def test_criterion_4_secular_frequency_and_scan(verdict):
    t0 = time.perf_counter()
    r0, W = 1e-3, 2 * math.pi * 100e6
    T = 2 * math.pi / W
    errs = {}
    # q = 0.1 needs 2000 drive periods to span 50 secular periods for the FFT
    for q, periods in ((0.1, 2000), (0.2, 1000)):
        field = FieldModel.quadrupole(DriveConfig(amplitude_for_q(q, W, r0), W), r0)
        tr = integrate([electron((1e-5, 0, 0))], field, periods * T, T / 50)[0]
        errs[q] = rel(extract_secular(tr, "x"), secular_frequency(q, W))
    M = scan_stability(DriveConfig(1.0, W), r0, [0.3, 1.5], [0.0], periods=1000)
    dt = time.perf_counter() - t0
    ok = max(errs.values()) <= 0.05 and M.tolist() == [[True], [False]] and dt < 60
    verdict(4, ok, f"secular error q=0.1: {errs[0.1]:.2e}, q=0.2: {errs[0.2]:.2e} (<= 5e-2); "
                   f"scan q_e=(0.3, 1.5) bounded = {M[:, 0].tolist()}; runtime {dt:.1f} s (< 60 s)")


def test_criterion_5_parametric_resonance_scaling(verdict):
    tab = parametric_resonances(88.0, 1.8e-3, 10)
    prod = tab[:, 1] * np.sqrt(tab[:, 0])
    spread = float(np.max(np.abs(prod / prod[0] - 1)))
    verdict(5, spread <= 1e-12 and tab.shape[0] == 10,
            f"max |Omega_res(n) sqrt(n) / Omega_res(1) - 1| = {spread:.1e} (<= 1e-12), n = 1..10")


def test_criterion_6_quantum_limits(verdict):
    hyd = RadialProblem(Z=2.0, omega=0.0, box_radius=100.0, basis=SplineBasis(7, 120))
    lad, t1 = timed(eigenlevels, hyd, 3)
    exact = np.array([-2.0, -0.5, -2.0 / 9.0])
    e1 = float(np.max(np.abs(lad.energies - exact) / np.abs(exact)))
    w = 1e-3
    ho = RadialProblem(Z=0.0, omega=w, box_radius=600.0, basis=SplineBasis(7, 150))
    lad2, t2 = timed(eigenlevels, ho, 20)
    e2 = float(np.max(np.abs(np.diff(lad2.energies) / (2 * w) - 1)))
    ok = e1 <= 1e-6 and e2 <= 1e-6 and t1 < 30 and t2 < 30
    verdict(6, ok, f"hydrogenic rel. error {e1:.1e}, oscillator spacing rel. error {e2:.1e} "
                   f"(<= 1e-6); runtime {t1:.2f} s, {t2:.2f} s (< 30 s)")


def test_criterion_7_transition_shape_and_numerov(verdict, numerov_levels):
    w = 1e-3
    R = suggest_box_radius(2.0, w, 300)
    coarse = eigenlevels(RadialProblem(2.0, w, 0, R, SplineBasis(7, 1600)), 300)
    fine = eigenlevels(RadialProblem(2.0, w, 0, R, SplineBasis(7, 2400)), 300)
    i0 = spacing_profile(coarse.energies[:coarse.converged_count]).min_index
    i1 = spacing_profile(fine.energies[:fine.converged_count]).min_index
    shape_ok = i0 is not None and i1 is not None and abs(i0 - i1) <= 2

    p = RadialProblem(Z=2.0, omega=1e-4, box_radius=2500.0, basis=SplineBasis(7, 750))
    lad = eigenlevels(p, 50)
    err = float(np.max(np.abs(lad.energies - numerov_levels) / np.abs(numerov_levels)))
    verdict(7, shape_ok and err <= 1e-6,
            f"interior spacing minimum index {i0} -> {i1} under x1.5 basis (need a minimum, "
            f"stable within 2); Numerov agreement {err:.1e} (<= 1e-6)")


def test_criterion_8_tuning_curves(verdict):
    V = [0.5, 0.75, 1.0, 1.25, 1.5]
    w = 1e-3
    harm = tuning_curve(RadialProblem(2.0, w, 0, suggest_box_radius(2.0, w, 152),
                                      SplineBasis(7, 1000)), 150, V, 1.0)
    coul = tuning_curve(RadialProblem(2.0, w, 0, suggest_box_radius(2.0, w, 4),
                                      SplineBasis(7, 800)), 2, V, 1.0)
    e_h = float(np.max(np.abs(harm[:, 1] / harm[:, 0] - 1)))
    e_c = float(np.max(np.abs(coul[:, 1] - 1)))
    verdict(8, e_h <= 0.02 and e_c <= 0.01,
            f"harmonic state tracks V/V_ref within {e_h:.2e} (<= 2e-2); "
            f"Coulomb state flat within {e_c:.2e} (<= 1e-2)")


def test_criterion_9_noise_golden_numbers(verdict):
    checks = {}
    S_jn = s_jn(300, get_preset("copper-300K").circuit_resistance, 1.68e-3)
    checks["S_JN"] = rel(S_jn, 6.1e-15) <= 0.02
    g_jn = ground_state_heating_rate(S_jn, W73)
    checks["Gamma0(JN)"] = rel(g_jn, 8900) <= 0.05
    checks["Tdot(JN)"] = rel(temperature_rate(g_jn, W73), 3.1) <= 0.05
    S_b = s_bbs(300, 2.4e-8, 1.68e-3, W73)
    g_b = ground_state_heating_rate(S_b, W73)
    checks["S_BBS"] = 1 / 1.5 <= S_b / 2.5e-19 <= 1.5
    checks["Gamma0(BBS)"] = 1 / 1.5 <= g_b / 0.37 <= 1.5
    totals = {}
    for name, ref in (("copper-300K", 610), ("copper-0.4K", 0.31), ("ybco-93K", 0.93)):
        totals[name] = budget(get_preset(name)).total_S_E / TABLE_UNITS["Total"]
        checks[f"Total {name}"] = rel(totals[name], ref) <= 0.02
    cryo = combined_cryogenic_rate(get_preset("copper-0.4K"))
    checks["cryogenic rate"] = rel(cryo, 3.7) <= 0.15
    delta = skin_depth(1.7e-8, 2 * math.pi * 2.4e9)
    checks["skin depth"] = rel(delta, 1.3e-6) <= 0.10
    interval = 1 / collision_rate(2.5e-8, 300)
    sigma = cross_section_for_interval(30, 2.5e-8, 300)
    checks["collision interval"] = rel(interval, 30) <= 0.20 and 4e-20 <= sigma <= 7e-20
    failed = [k for k, v in checks.items() if not v]
    verdict(9, not failed,
            f"S_JN {S_jn:.3g}, Gamma0(JN) {g_jn:.4g}/s, S_BBS {S_b:.3g}, Gamma0(BBS) {g_b:.3g}/s, "
            f"totals {', '.join(f'{v:.4g}' for v in totals.values())}, cryogenic {cryo:.3g}/s, "
            f"skin depth {delta * 1e6:.3g} um, interval {interval:.3g} s, sigma {sigma:.3g} m2"
            + (f"; failed: {', '.join(failed)}" if failed else ""))


RUNS = [
    ("geometry", "geometry_optimize.ini", ()),
    ("geometry", "geometry_profile.ini", ()),
    ("stability", "stability.ini", ()),
    ("dynamics", "dynamics.ini", ()),
    ("spectrum", "spectrum.ini", ()),
    ("noise", "noise.ini", ()),
    ("noise", "noise.ini", ("--table2",)),
]


def test_criterion_10_determinism(verdict, tmp_path):
    mismatched = []
    n_files = 0
    for i, (cmd, cfg, extra) in enumerate(RUNS):
        outs = []
        for rep in "ab":
            out = tmp_path / f"{i}{rep}"
            assert main([cmd, "--config", str(CONFIGS / cfg), "--out", str(out), *extra]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        n_files += len(outs[0])
        if outs[0] != outs[1]:
            mismatched.append(f"{cmd} {cfg}")
    verdict(10, not mismatched,
            f"{len(RUNS)} subcommand runs, {n_files} files byte-identical on rerun"
            + (f"; differ: {mismatched}" if mismatched else ""))
