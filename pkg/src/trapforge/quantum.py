"""Radial eigenproblem for an electron in a Coulomb well plus harmonic trap.

Everything in this module is in Hartree atomic units (m_e = e = hbar = 1).
The radial function u(r) = r R(r) is expanded in clamped B-splines on
[0, R_max]; dropping the first and last spline imposes u(0) = u(R_max) = 0.
The generalized symmetric problem H c = E S c is then solved densely.

Typical use::

    problem = RadialProblem(Z=2.0, omega=1e-4, box_radius=2500.0,
                            basis=SplineBasis(count=700))
    ladder = eigenlevels(problem, 50)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.interpolate import BSpline
from scipy.optimize import brentq

from .drive import DriveConfig, secular_frequency, stability_params
from .units import Quantity, si_to_au

__all__ = [
    "SplineBasis",
    "RadialProblem",
    "LevelLadder",
    "SpacingProfile",
    "ConvergenceError",
    "potential",
    "crossover_radius",
    "suggest_box_radius",
    "build_knots",
    "eigenlevels",
    "spacing_profile",
    "classify_regions",
    "region_radii",
    "transition_energy",
    "omega_from_drive",
    "problem_from_drive",
    "tuning_curve",
]

LAYOUTS = ("linear", "geometric", "mixed")


class ConvergenceError(RuntimeError):
    """A requested level is not stable under basis refinement."""


@dataclass(frozen=True)
class SplineBasis:
    """B-spline basis description.

    ``count`` is the number of splines before the two boundary splines are
    removed. ``first_width`` (a.u.) is the innermost knot interval for the
    geometric and mixed layouts; ``None`` picks a value from the problem's
    natural length scale.
    """

    order: int = 7
    count: int = 200
    layout: str = "mixed"
    first_width: float | None = None

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ValueError(f"knot layout must be one of {LAYOUTS}, got {self.layout!r}")
        if self.order < 2:
            raise ValueError("spline order must be >= 2")
        if self.count < 10 * self.order:
            raise ValueError(
                f"basis count {self.count} below 10 x order ({10 * self.order})"
            )

    def scaled(self, factor: float) -> "SplineBasis":
        return replace(self, count=int(round(self.count * factor)))


@dataclass(frozen=True)
class RadialProblem:
    Z: float = 2.0
    omega: float = 0.0
    ell: int = 0
    box_radius: float = 200.0
    basis: SplineBasis = field(default_factory=SplineBasis)

    def __post_init__(self):
        if self.Z < 0 or self.omega < 0:
            raise ValueError("Z and omega must be non-negative")
        if self.Z == 0 and self.omega == 0:
            raise ValueError("Z = 0 and omega = 0 together have no bound states")
        if self.ell < 0 or int(self.ell) != self.ell:
            raise ValueError("angular momentum must be a non-negative integer")
        if self.omega > 0 and self.box_radius < 8.0 / math.sqrt(self.omega):
            raise ValueError(
                f"box radius {self.box_radius:g} a.u. is smaller than "
                f"8/sqrt(omega) = {8.0 / math.sqrt(self.omega):g} a.u."
            )

    @property
    def length_scale(self) -> float:
        if self.Z > 0:
            return 1.0 / self.Z
        return 1.0 / math.sqrt(self.omega)


@dataclass
class LevelLadder:
    energies: np.ndarray
    problem: RadialProblem
    converged_count: int
    requested: int

    @property
    def complete(self) -> bool:
        """True when every requested level survived the refinement check."""
        return self.converged_count >= self.requested

    def __len__(self):
        return len(self.energies)


@dataclass
class SpacingProfile:
    index: np.ndarray
    spacing: np.ndarray
    min_index: int | None  # None when the profile is flat or monotone
    flat: bool


def potential(Z, omega, r):
    """Combined potential -Z/r + omega^2 r^2 / 2 (a.u.)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("potential is defined for r > 0 only")
    out = -Z / r + 0.5 * omega * omega * r * r
    return float(out) if out.ndim == 0 else out


def crossover_radius(Z, omega):
    """(r*, Psi(r*)) with r* = (Z / omega^2)^(1/3).

    The combined potential rises monotonically (dPsi/dr = Z/r^2 + omega^2 r
    > 0), so it has no minimum; r* is where the Coulomb and trap forces are
    equally strong.
    """
    if Z <= 0 or omega <= 0:
        raise ValueError("crossover needs Z > 0 and omega > 0")
    r_star = (Z / omega**2) ** (1.0 / 3.0)
    return r_star, potential(Z, omega, r_star)


def suggest_box_radius(Z: float, omega: float, count: int, margin: float = 10.0) -> float:
    """Box radius that comfortably contains the lowest ``count`` s-levels.

    Uses the harmonic turning point of level ``count`` plus ``margin``
    oscillator lengths, or for omega = 0 the hydrogenic extent of n = count.
    """
    if omega > 0:
        energy = (2 * count + 1.5) * omega
        r_turn = math.sqrt(2.0 * energy) / omega
        return max(r_turn + margin / math.sqrt(omega), 8.0 / math.sqrt(omega))
    n = count
    return (2.0 * n * n + margin * n + 20.0) / Z


def build_knots(problem: RadialProblem) -> np.ndarray:
    """Full clamped knot vector (end knots repeated ``order`` times)."""
    basis = problem.basis
    k = basis.order
    n_int = basis.count - k + 1
    R = problem.box_radius
    if basis.layout == "linear":
        inner = np.linspace(0.0, R, n_int + 1)
    else:
        h0 = basis.first_width or 0.02 * problem.length_scale
        h0 = min(h0, R / n_int)
        if basis.layout == "geometric":
            inner = _geometric_breaks(h0, R, n_int)
        else:
            inner = _mixed_breaks(h0, R, n_int)
    return np.concatenate([np.zeros(k - 1), inner, np.full(k - 1, R)])


def _geometric_breaks(h0, R, n_int):
    # growth g solves h0 (g^n - 1) / (g - 1) = R
    if abs(h0 * n_int - R) < 1e-12 * R:
        return np.linspace(0.0, R, n_int + 1)
    f = lambda g: h0 * (g**n_int - 1.0) / (g - 1.0) - R
    g = brentq(f, 1.0 + 1e-12, 2.0 ** (60.0 / n_int) + 1.0)
    widths = h0 * g ** np.arange(n_int)
    breaks = np.concatenate([[0.0], np.cumsum(widths)])
    breaks[-1] = R
    return breaks


def _mixed_breaks(h0, R, n_int, growth=1.08):
    # geometric run from h0 until the widths reach the uniform spacing that
    # fills the rest of the box; pick the switch point with the best match
    best = None
    for n_geo in range(0, n_int):
        widths = h0 * growth ** np.arange(n_geo)
        covered = widths.sum()
        if covered >= R:
            break
        h_lin = (R - covered) / (n_int - n_geo)
        last = widths[-1] * growth if n_geo else h0
        mismatch = abs(math.log(h_lin / last))
        if best is None or mismatch < best[0]:
            best = (mismatch, widths, h_lin)
    _, widths, h_lin = best
    n_lin = n_int - widths.size
    breaks = np.concatenate(
        [[0.0], np.cumsum(widths), widths.sum() + h_lin * np.arange(1, n_lin + 1)]
    )
    breaks[-1] = R
    return breaks


def _assemble(problem: RadialProblem):
    basis = problem.basis
    k = basis.order
    degree = k - 1
    t = build_knots(problem)
    breaks = np.unique(t)
    n_quad = k + 2
    xg, wg = np.polynomial.legendre.leggauss(n_quad)
    lo, hi = breaks[:-1], breaks[1:]
    half = 0.5 * (hi - lo)
    x = (lo[:, None] + half[:, None] * (xg[None, :] + 1.0)).ravel()
    w = (half[:, None] * wg[None, :]).ravel()

    V = -problem.Z / x + 0.5 * problem.omega**2 * x * x
    if problem.ell:
        V = V + 0.5 * problem.ell * (problem.ell + 1) / (x * x)
    bad = ~np.isfinite(V)
    if np.any(bad):
        idx = int(np.searchsorted(breaks, x[bad][0], side="right") - 1)
        raise FloatingPointError(
            f"non-finite potential in knot interval {idx} "
            f"[{breaks[idx]:.6g}, {breaks[idx + 1]:.6g}] a.u."
        )

    B = BSpline.design_matrix(x, t, degree).tocsc()
    # derivative via one degree lower on the same knots
    Bl = BSpline.design_matrix(x, t, degree - 1).tocsc()
    n = B.shape[1]
    denom = t[degree : degree + n + 1] - t[: n + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(denom > 0, degree / denom, 0.0)
    Bl = Bl @ sparse.diags(scale)
    dB = Bl[:, :n] - Bl[:, 1 : n + 1]

    keep = slice(1, n - 1)  # Dirichlet at both ends
    B = B[:, keep]
    dB = dB[:, keep]
    W = sparse.diags(w)
    S = (B.T @ W @ B).toarray()
    T = 0.5 * (dB.T @ W @ dB).toarray()
    Vm = (B.T @ sparse.diags(w * V) @ B).toarray()
    H = T + Vm
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(S))):
        col = int(np.argwhere(~np.isfinite(H))[0, 0])
        raise FloatingPointError(
            f"non-finite Hamiltonian entry for spline {col + 1} "
            f"starting at knot {t[col + 1]:.6g} a.u."
        )
    return H, S


def _solve(problem: RadialProblem, count: int) -> np.ndarray:
    H, S = _assemble(problem)
    count = min(count, H.shape[0])
    _, vecs = scipy.linalg.eigh(H, S, subset_by_index=[0, count - 1], driver="gvx")
    # eigh's absolute error scales with ||H|| (set by the tiny inner knot
    # intervals); the Rayleigh quotient is second order in the vector error
    num = np.einsum("ij,ij->j", vecs, H @ vecs)
    den = np.einsum("ij,ij->j", vecs, S @ vecs)
    return np.sort(num / den)


def eigenlevels(
    problem: RadialProblem,
    count: int,
    *,
    refine: float = 1.5,
    rtol: float = 1e-8,
) -> LevelLadder:
    """Lowest ``count`` eigenvalues with a refinement-based trust count.

    The problem is solved again with ``refine`` times as many splines; a
    level counts as converged when the two answers agree to ``rtol``
    relative to max(|E|, omega). The returned ladder keeps all ``count``
    levels and reports how many leading ones passed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    coarse = _solve(problem, count)
    fine = _solve(replace(problem, basis=problem.basis.scaled(refine)), count)
    m = min(coarse.size, fine.size)
    floor = max(problem.omega, 1e-300)
    ok = np.abs(coarse[:m] - fine[:m]) <= rtol * np.maximum(np.abs(fine[:m]), floor)
    converged = m if ok.all() else int(np.argmin(ok))
    return LevelLadder(
        energies=fine[:m], problem=problem, converged_count=converged, requested=count
    )


def spacing_profile(ladder: LevelLadder, flat_rtol: float = 1e-6) -> SpacingProfile:
    """Consecutive level gaps and the index of the narrowest interior gap."""
    E = np.asarray(ladder.energies if isinstance(ladder, LevelLadder) else ladder)
    if E.size < 3:
        raise ValueError("spacing profile needs at least 3 levels")
    dE = np.diff(E)
    idx = np.arange(dE.size)
    flat = bool(np.ptp(dE) <= flat_rtol * np.abs(dE).max())
    j = int(np.argmin(dE))
    interior = 0 < j < dE.size - 1
    return SpacingProfile(idx, dE, j if (interior and not flat) else None, flat)


def region_radii(Z: float, omega: float, threshold: float = 0.10, n_scan: int = 4096):
    """Radii bounding the transition region.

    Returns (r_low, r_high): r_low is where the combined potential first
    deviates from the bare Coulomb term by more than ``threshold``; r_high
    is where its deviation from the bare harmonic term last exceeds it.
    Located by a logarithmic scan followed by root polishing.
    """
    if Z <= 0 or omega <= 0:
        raise ValueError("region classification needs Z > 0 and omega > 0")
    r_star = (Z / omega**2) ** (1.0 / 3.0)
    r = np.geomspace(r_star * 1e-4, r_star * 1e4, n_scan)
    vc = -Z / r
    vp = 0.5 * omega**2 * r * r
    psi = vc + vp
    dev_c = np.abs(psi - vc) / np.abs(vc) - threshold
    dev_p = np.abs(psi - vp) / np.abs(vp) - threshold

    def polish(f, values, first):
        flips = np.flatnonzero(np.diff(np.sign(values)) != 0)
        i = flips[0] if first else flips[-1]
        return brentq(f, r[i], r[i + 1], xtol=1e-14 * r[i + 1], rtol=1e-15)

    r_low = polish(
        lambda x: 0.5 * omega**2 * x**3 / Z - threshold, dev_c, first=True
    )
    r_high = polish(
        lambda x: 2.0 * Z / (omega**2 * x**3) - threshold, dev_p, first=False
    )
    return r_low, r_high


def classify_regions(Z: float, omega: float, threshold: float = 0.10):
    """Potential energies (a.u.) at the lower and upper transition-region edges."""
    r_low, r_high = region_radii(Z, omega, threshold)
    return potential(Z, omega, r_low), potential(Z, omega, r_high)


def transition_energy(ladder: LevelLadder, index: int, delta: int = 1) -> float:
    """E[index + delta] - E[index] within the converged part of the ladder."""
    top = index + delta
    if index < 0 or delta < 1 or top >= ladder.converged_count:
        raise IndexError(
            f"levels {index}..{top} outside the {ladder.converged_count} converged levels"
        )
    return float(ladder.energies[top] - ladder.energies[index])


def omega_from_drive(drive: DriveConfig, r0: float, atomic_units: bool = False) -> float:
    """Electron secular angular frequency implied by the drive."""
    q_e, _ = stability_params(drive, r0)
    omega = secular_frequency(q_e, drive.Omega_e)
    if atomic_units:
        return si_to_au(Quantity(omega, "angular-frequency")).value
    return omega


def problem_from_drive(
    drive: DriveConfig, r0: float, Z: float = 2.0, ell: int = 0,
    box_radius: float | None = None, basis: SplineBasis | None = None,
    levels: int = 100,
) -> RadialProblem:
    omega = omega_from_drive(drive, r0, atomic_units=True)
    if box_radius is None:
        box_radius = suggest_box_radius(Z, omega, levels)
    return RadialProblem(Z, omega, ell, box_radius, basis or SplineBasis())


def tuning_curve(
    base: RadialProblem,
    state_index: int,
    V_grid,
    V_ref: float,
    *,
    drive: DriveConfig | None = None,
    r0: float | None = None,
    delta: int = 1,
):
    """Relative transition energy dE(V) / dE(V_ref) across a voltage sweep.

    The secular frequency is taken proportional to the electron drive
    amplitude. With ``drive`` and ``r0`` given, omega(V) comes from the
    drive itself; otherwise ``base.omega`` is the value at ``V_ref``. The
    box grows as omega shrinks so the same states stay inside it.

    Returns an (n, 2) array of (V, ratio).
    """
    V_grid = np.asarray(V_grid, dtype=float)
    if not np.any(np.isclose(V_grid, V_ref, rtol=0, atol=1e-12 * abs(V_ref))):
        raise ValueError("V_ref must be one of the grid voltages")

    def omega_at(V):
        if drive is not None:
            return omega_from_drive(drive.with_amplitudes(V_e0=V), r0, atomic_units=True)
        return base.omega * V / V_ref

    omega_ref = omega_at(V_ref)

    def gap(V):
        om = omega_at(V)
        box = base.box_radius * max(1.0, math.sqrt(omega_ref / om))
        prob = replace(base, omega=om, box_radius=box)
        ladder = eigenlevels(prob, state_index + delta + 1)
        if ladder.converged_count < state_index + delta + 1:
            raise ConvergenceError(
                f"level {state_index + delta} not converged at V = {V:g} V "
                f"(only {ladder.converged_count} levels stable)"
            )
        return transition_energy(ladder, state_index, delta)

    ref = gap(V_ref)
    ratios = []
    for V in V_grid:
        ratios.append(1.0 if V == V_ref else gap(V) / ref)
    return np.column_stack([V_grid, ratios])
