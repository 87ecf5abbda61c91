"""Ring ("point") surface trap in the gapless-plane approximation.

An rf ring a < rho < b sits in an otherwise grounded infinite plane. On the
symmetry axis the unit-voltage potential is

    phi(z) = z / sqrt(a^2 + z^2) - z / sqrt(b^2 + z^2)

and the rf null, the escape point and the ratio b/a that maximises trap
depth or steepness all follow in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .units import CONSTANTS

__all__ = [
    "RingGeometry",
    "AxialProfile",
    "height_from_radii",
    "inner_radius_for_height",
    "steepness_shape",
    "depth_shape",
    "golden_section_max",
    "optimize_ratio",
    "on_axis_potential",
    "on_axis_field",
    "axis_derivatives",
    "pseudopotential_profile",
    "escape_height",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def height_from_radii(a: float, b: float) -> float:
    """Height of the rf null above the plane, h = a r^(2/3) / sqrt(1 + r^(2/3))."""
    if not (b > a > 0):
        raise ValueError(f"need b > a > 0, got a={a!r}, b={b!r}")
    r23 = (b / a) ** (2.0 / 3.0)
    return a * r23 / math.sqrt(1.0 + r23)


def inner_radius_for_height(h: float, r: float) -> float:
    """Inner radius giving an rf null at height ``h`` for ratio ``r = b/a``."""
    if not r > 1:
        raise ValueError(f"ratio must exceed 1, got {r!r}")
    if not h > 0:
        raise ValueError("height must be positive")
    r23 = r ** (2.0 / 3.0)
    return h * math.sqrt(1.0 + r23) / r23


@dataclass(frozen=True)
class RingGeometry:
    inner_radius: float
    outer_radius: float
    characteristic_dim: float | None = None

    def __post_init__(self):
        if not (self.outer_radius > self.inner_radius > 0):
            raise ValueError(
                f"need outer > inner > 0, got {self.inner_radius!r}, {self.outer_radius!r}"
            )

    @classmethod
    def from_height(cls, h: float, r: float, characteristic_dim=None) -> "RingGeometry":
        a = inner_radius_for_height(h, r)
        return cls(a, r * a, characteristic_dim)

    @property
    def ratio(self) -> float:
        return self.outer_radius / self.inner_radius

    @property
    def height(self) -> float:
        return height_from_radii(self.inner_radius, self.outer_radius)

    @property
    def r0(self) -> float:
        """Quadrupole length scale; the trap height unless set explicitly."""
        return self.characteristic_dim if self.characteristic_dim else self.height


def _check_ratio(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 1):
        raise ValueError("shape functions need r > 1")
    return r


def steepness_shape(r):
    """Steepness of the axial pseudopotential vs b/a at fixed null height (arb. units)."""
    r = _check_ratio(r)
    r45 = r**0.8 - 1.0
    den = (
        (r ** (2 / 3) + 1.0)
        * (r * r - 1.0) ** 3
        * (np.sqrt((r ** (2 / 3) + 1.0) * (r**1.2 - 1.0)) - r ** (4 / 15) * np.sqrt(r45))
    )
    out = r**1.6 * r45**5.5 / den
    return float(out) if out.ndim == 0 else out


def depth_shape(r):
    """Axial trap depth vs b/a at fixed null height (arb. units)."""
    r = _check_ratio(r)
    out = r ** (4 / 3) * (r**0.8 - 1.0) ** 5 / ((r ** (2 / 3) + 1.0) * (r * r - 1.0) ** 3)
    return float(out) if out.ndim == 0 else out


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-6, max_iter: int = 500):
    """Maximiser of a unimodal ``f`` on [lo, hi] to within ``tol``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def optimize_ratio(metric: str = "steepness", search_interval=(1.5, 20.0), tolerance=1e-6):
    """Ratio b/a that maximises the chosen shape function.

    ``metric`` is ``"steepness"`` or ``"depth"``. Raises ``ValueError`` when
    the optimum lands on an interval edge, i.e. the interval does not
    bracket an interior maximum.
    """
    funcs = {"steepness": steepness_shape, "depth": depth_shape}
    if metric not in funcs:
        raise ValueError(f"metric must be 'steepness' or 'depth', got {metric!r}")
    lo, hi = search_interval
    if not (1 < lo < hi):
        raise ValueError("search interval must satisfy 1 < r_lo < r_hi")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    r_best = golden_section_max(funcs[metric], lo, hi, tolerance)
    edge = 10 * tolerance
    if r_best - lo < edge or hi - r_best < edge:
        raise ValueError(
            f"{metric} maximum not bracketed by ({lo:g}, {hi:g}); optimum sits on the edge"
        )
    return r_best


def on_axis_potential(geom: RingGeometry, applied_voltage: float, z):
    """Axial potential [V] of the ring held at ``applied_voltage``."""
    z = np.asarray(z, dtype=float)
    a, b = geom.inner_radius, geom.outer_radius
    out = applied_voltage * (z / np.sqrt(a * a + z * z) - z / np.sqrt(b * b + z * z))
    return float(out) if out.ndim == 0 else out


def axis_derivatives(geom: RingGeometry, z):
    """First three z-derivatives of the unit-voltage axial potential."""
    z = np.asarray(z, dtype=float)
    d1 = d2 = d3 = 0.0
    for c, sign in ((geom.inner_radius, 1.0), (geom.outer_radius, -1.0)):
        s = c * c + z * z
        d1 = d1 + sign * c * c / s**1.5
        d2 = d2 - sign * 3.0 * c * c * z / s**2.5
        d3 = d3 - sign * 3.0 * c * c * (c * c - 4.0 * z * z) / s**3.5
    return d1, d2, d3


def on_axis_field(geom: RingGeometry, applied_voltage: float, z):
    """Axial field E_z = -d(phi)/dz [V/m]."""
    out = -applied_voltage * axis_derivatives(geom, z)[0]
    return float(out) if np.ndim(out) == 0 else out


def escape_height(geom: RingGeometry) -> float:
    """Closed-form height of the axial field-magnitude maximum beyond the null."""
    a, b = geom.inner_radius, geom.outer_radius
    return (a * b) ** 0.4 * math.sqrt((b**1.2 - a**1.2) / (b**0.8 - a**0.8))


@dataclass
class AxialProfile:
    z_samples: np.ndarray
    pseudopotential: np.ndarray  # J
    field_null_height: float
    turning_point: float
    depth: float  # J
    steepness: float  # J/m
    secular_frequency: float  # rad/s, axial, from the curvature at the null

    @property
    def pseudopotential_K(self) -> np.ndarray:
        return self.pseudopotential / CONSTANTS.boltzmann

    @property
    def depth_K(self) -> float:
        return self.depth / CONSTANTS.boltzmann


def pseudopotential_profile(geom, amplitude, angular_frequency, species, z_grid) -> AxialProfile:
    """Axial pseudopotential Q^2 E_z^2 / (4 m Omega^2) and its landmarks.

    ``species`` needs ``mass`` and ``charge`` attributes. The null and the
    escape point are located on the grid first and then polished on the
    analytic field, so they do not depend on the grid spacing. A zero
    amplitude gives a flat profile with zero depth.
    """
    z = np.asarray(z_grid, dtype=float)
    if amplitude < 0 or angular_frequency <= 0:
        raise ValueError("need amplitude >= 0 and angular_frequency > 0")
    if z.ndim != 1 or z.size < 3 or np.any(np.diff(z) <= 0):
        raise ValueError("z grid must be a strictly increasing 1-D array")
    if z[0] > 0 or z[-1] < 5 * geom.outer_radius:
        raise ValueError("z grid must span [0, >= 5 * outer radius]")

    prefactor = species.charge**2 * amplitude**2 / (4.0 * species.mass * angular_frequency**2)
    d1 = axis_derivatives(geom, z)[0]
    shape = d1 * d1  # unit-voltage E_z^2
    flips = np.flatnonzero(np.sign(d1[1:]) != np.sign(d1[:-1]))
    if flips.size == 0 or flips[0] + 2 >= z.size:
        raise ValueError("grid too coarse to bracket the null and the escape point; refine it")
    i_min = int(flips[0]) + 1
    i_max = i_min + int(np.argmax(shape[i_min:]))
    if i_max >= z.size - 1 or i_max <= i_min:
        raise ValueError("grid too coarse to bracket the null and the escape point; refine it")

    field1 = lambda x: axis_derivatives(geom, x)[0]
    h = brentq(field1, z[i_min - 1], z[i_min], xtol=1e-15 * z[i_min], rtol=1e-15)
    res = minimize_scalar(
        lambda x: -field1(x) ** 2,
        bounds=(z[i_max - 1], z[i_max + 1]),
        method="bounded",
        options={"xatol": 1e-12 * z[i_max]},
    )
    z_max = float(res.x)
    depth = prefactor * (field1(z_max) ** 2 - field1(h) ** 2)
    psi = prefactor * shape
    # curvature at the null: Psi'' = 2 * prefactor * (phi'')^2 there
    d2 = axis_derivatives(geom, h)[1]
    omega_sec = math.sqrt(2.0 * prefactor * d2 * d2 / species.mass)
    return AxialProfile(
        z_samples=z,
        pseudopotential=psi,
        field_null_height=h,
        turning_point=z_max,
        depth=depth,
        steepness=depth / (z_max - h),
        secular_frequency=omega_sec,
    )
