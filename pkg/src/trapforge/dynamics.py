"""Classical trajectories in the two-frequency trap.

Particles are pushed with a fixed-step velocity-Verlet scheme using the
instantaneous field at each half of the step. Two field models are
available: the ideal quadrupole V(t) U(x, y, z) centred at the origin, and
the ring trap's axial potential with its second-order paraxial expansion
centred on the rf null at (0, 0, h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .drive import DriveConfig, amplitude_for_q, waveform
from .geometry import RingGeometry, axis_derivatives
from .units import CONSTANTS

__all__ = [
    "SpeciesState",
    "FieldModel",
    "Trajectory",
    "IntegrationError",
    "electron",
    "calcium_ion",
    "integrate",
    "extract_secular",
    "scan_stability",
    "coulomb_significance",
    "radial_secular_frequency",
]

CA40_MASS = 39.962590863 * CONSTANTS.atomic_mass_unit
MIN_SEPARATION = 1e-9  # m; closer encounters are outside this model
STEPS_PER_PERIOD_MIN = 50


class IntegrationError(RuntimeError):
    pass


@dataclass
class SpeciesState:
    mass: float
    charge: float
    position: np.ndarray
    velocity: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(3)
        self.velocity = np.asarray(self.velocity, dtype=float).reshape(3)
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not (np.all(np.isfinite(self.position)) and np.all(np.isfinite(self.velocity))):
            raise ValueError("position and velocity must be finite")


def electron(position=(0.0, 0.0, 0.0), velocity=(0.0, 0.0, 0.0)) -> SpeciesState:
    return SpeciesState(
        CONSTANTS.electron_mass, -CONSTANTS.elementary_charge, position, velocity, "electron"
    )


def calcium_ion(charge_state=1, position=(0.0, 0.0, 0.0), velocity=(0.0, 0.0, 0.0)):
    m = CA40_MASS - charge_state * CONSTANTS.electron_mass
    label = "Ca+" if charge_state == 1 else f"Ca{charge_state}+"
    return SpeciesState(m, charge_state * CONSTANTS.elementary_charge, position, velocity, label)


@dataclass(frozen=True)
class FieldModel:
    variant: str
    drive: DriveConfig
    r0: float | None = None
    geometry: RingGeometry | None = None
    coulomb: bool = False

    def __post_init__(self):
        if self.variant == "quadrupole":
            if not (self.r0 and self.r0 > 0):
                raise ValueError("quadrupole field needs r0 > 0")
        elif self.variant == "ring_axis":
            if self.geometry is None:
                raise ValueError("ring_axis field needs a RingGeometry")
        else:
            raise ValueError(f"unknown field variant {self.variant!r}")

    @classmethod
    def quadrupole(cls, drive, r0, coulomb=False):
        return cls("quadrupole", drive, r0=r0, coulomb=coulomb)

    @classmethod
    def ring_axis(cls, geometry, drive, coulomb=False):
        return cls("ring_axis", drive, geometry=geometry, coulomb=coulomb)

    @property
    def center(self) -> np.ndarray:
        if self.variant == "quadrupole":
            return np.zeros(3)
        return np.array([0.0, 0.0, self.geometry.height])

    @property
    def length_scale(self) -> float:
        return self.r0 if self.variant == "quadrupole" else self.geometry.r0

    @property
    def radial_gradient(self) -> float:
        """d(E_x)/dx per volt at the centre [1/m^2]."""
        if self.variant == "quadrupole":
            return 1.0 / self.r0**2
        return 0.5 * abs(axis_derivatives(self.geometry, self.geometry.height)[1])

    def unit_potential(self, x):
        """Spatial factor of the potential per volt; ``x`` is absolute, shape (..., 3)."""
        if self.variant == "quadrupole":
            return (x[..., 0] ** 2 + x[..., 1] ** 2 - 2.0 * x[..., 2] ** 2) / (2.0 * self.r0**2)
        a, b = self.geometry.inner_radius, self.geometry.outer_radius
        z = x[..., 2]
        rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
        phi = z / np.sqrt(a * a + z * z) - z / np.sqrt(b * b + z * z)
        return phi - 0.25 * rho2 * axis_derivatives(self.geometry, z)[1]

    def unit_field(self, x):
        """Electric field per volt at absolute positions ``x`` of shape (P, 3)."""
        if self.variant == "quadrupole":
            out = -x / self.r0**2
            out[:, 2] *= -2.0
            return out
        d1, d2, d3 = axis_derivatives(self.geometry, x[:, 2])
        rho2 = x[:, 0] ** 2 + x[:, 1] ** 2
        out = np.empty_like(x)
        out[:, 0] = 0.5 * x[:, 0] * d2
        out[:, 1] = 0.5 * x[:, 1] * d2
        out[:, 2] = -(d1 - 0.25 * rho2 * d3)
        return out


@dataclass
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    bounded: bool
    escape_time: float | None
    energy_samples: np.ndarray
    label: str = ""
    field: FieldModel | None = None

    def to_rows(self) -> np.ndarray:
        """(t, x, y, z, vx, vy, vz) rows for CSV export."""
        return np.column_stack([self.times, self.positions, self.velocities])


def radial_secular_frequency(field: FieldModel, mass=None, charge=None) -> float:
    """Pseudopotential radial secular frequency from the electron tone."""
    mass = CONSTANTS.electron_mass if mass is None else mass
    charge = CONSTANTS.elementary_charge if charge is None else abs(charge)
    d = field.drive
    return charge * d.V_e0 * field.radial_gradient / (math.sqrt(2.0) * mass * d.Omega_e)


def _coulomb_accel(x, q, m, active):
    k = CONSTANTS.coulomb_constant
    acc = np.zeros_like(x)
    idx = np.flatnonzero(active)
    for ii, i in enumerate(idx):
        for j in idx[ii + 1 :]:
            d = x[i] - x[j]
            r = math.sqrt(d @ d)
            if r < MIN_SEPARATION:
                raise IntegrationError(
                    f"particles {i} and {j} closer than {MIN_SEPARATION:g} m; "
                    "collision regime is out of scope"
                )
            f = k * q[i] * q[j] * d / r**3
            acc[i] += f / m[i]
            acc[j] -= f / m[j]
    return acc


def _verlet(x, v, accel, t0, h, n_steps, center, escape_radius):
    """Advance (P, 3) states; escaped particles are frozen where they left.

    Returns times, positions (n+1, P, 3), velocities and the escape step of
    each particle (-1 if it stayed inside).
    """
    P = x.shape[0]
    times = t0 + h * np.arange(n_steps + 1)
    X = np.empty((n_steps + 1, P, 3))
    Vel = np.empty_like(X)
    X[0], Vel[0] = x, v
    active = np.ones(P, dtype=bool)
    escape = np.full(P, -1)
    a = accel(x, times[0], active)
    half = 0.5 * h
    for n in range(n_steps):
        v_half = v + half * a
        x_new = x + h * v_half
        x_new[~active] = x[~active]
        a = accel(x_new, times[n + 1], active)
        v = v_half + half * a
        v[~active] = Vel[n][~active]
        x = x_new
        X[n + 1], Vel[n + 1] = x, v
        d = x - center
        out = active & (np.einsum("ij,ij->i", d, d) >= escape_radius**2)
        if out.any():
            escape[out] = n + 1
            active &= ~out
            if not active.any():
                X[n + 2 :] = x
                Vel[n + 2 :] = v
                break
    return times, X, Vel, escape


def _check_step(drive: DriveConfig, dt: float):
    limit = 2.0 * math.pi / drive.fastest_omega / STEPS_PER_PERIOD_MIN
    if not 0 < dt <= limit * (1 + 1e-12):
        raise ValueError(
            f"dt = {dt:.4g} s too large: need dt <= (2*pi/Omega)/{STEPS_PER_PERIOD_MIN} "
            f"= {limit:.4g} s for the fastest drive tone"
        )


def integrate(
    states,
    field: FieldModel,
    t_end: float,
    dt: float | None = None,
    escape_radius: float | None = None,
    *,
    t_start: float = 0.0,
) -> list[Trajectory]:
    """Integrate every particle from ``t_start`` to ``t_end``.

    ``dt`` defaults to the fastest drive period / 200; a ``t_end`` earlier
    than ``t_start`` integrates backwards in time. A particle that reaches
    ``escape_radius`` (default 10 r0) from the trap centre stops there and
    its trajectory is truncated at the escape time.
    """
    states = list(states)
    drive = field.drive
    if dt is None:
        dt = 2.0 * math.pi / drive.fastest_omega / 200.0
    _check_step(drive, dt)
    span = t_end - t_start
    if span == 0:
        raise ValueError("t_end must differ from t_start")
    n_steps = int(math.ceil(abs(span) / dt - 1e-9))
    h = math.copysign(abs(span) / n_steps, span)
    if escape_radius is None:
        escape_radius = 10.0 * field.length_scale

    x0 = np.array([s.position for s in states])
    v0 = np.array([s.velocity for s in states])
    q = np.array([s.charge for s in states])
    m = np.array([s.mass for s in states])
    qm = (q / m)[:, None]
    center = field.center

    def accel(x, t, active):
        a = qm * waveform(drive, t) * field.unit_field(x)
        if field.coulomb and len(states) > 1:
            a = a + _coulomb_accel(x, q, m, active)
        return a

    times, X, V, escape = _verlet(x0, v0, accel, t_start, h, n_steps, center, escape_radius)
    Vt = waveform(drive, times)
    out = []
    for i, s in enumerate(states):
        stop = escape[i] + 1 if escape[i] >= 0 else times.size
        xi, vi = X[:stop, i], V[:stop, i]
        energy = 0.5 * s.mass * np.einsum("ij,ij->i", vi, vi) + s.charge * Vt[:stop] * (
            field.unit_potential(xi)
        )
        out.append(
            Trajectory(
                times=times[:stop],
                positions=xi,
                velocities=vi,
                bounded=escape[i] < 0,
                escape_time=None if escape[i] < 0 else float(times[escape[i]]),
                energy_samples=energy,
                label=s.label,
                field=field,
            )
        )
    return out


def extract_secular(
    traj: Trajectory,
    axis: str = "x",
    max_frequency: float | None = None,
    min_periods: float = 50.0,
) -> float:
    """Dominant secular angular frequency [rad/s] along one axis.

    Hann-windowed, zero-padded periodogram with a parabolic fit to the log
    peak. The search stops below ``max_frequency``; by default that is the
    slowest active drive tone of the trajectory's field.
    """
    if not traj.bounded:
        raise ValueError("cannot extract a secular frequency from an unbounded trajectory")
    k = "xyz".index(axis)
    t = traj.times
    dt = t[1] - t[0]
    s = traj.positions[:, k] - traj.positions[:, k].mean()
    if not np.any(s):
        raise ValueError(f"no motion along {axis}")
    if max_frequency is None and traj.field is not None:
        d = traj.field.drive
        tones = [w for V, w in ((d.V_e0, d.Omega_e), (d.V_I0, d.Omega_I)) if V > 0]
        max_frequency = min(tones) if tones else None
    n_fft = 1 << int(math.ceil(math.log2(8 * s.size)))
    spec = np.abs(np.fft.rfft(s * np.hanning(s.size), n_fft))
    omega = 2.0 * math.pi * np.fft.rfftfreq(n_fft, dt)
    valid = omega > 0
    valid[: 3 * n_fft // s.size + 1] = False  # window main lobe around DC
    if max_frequency is not None:
        valid &= omega < max_frequency
    if not valid.any():
        raise ValueError("no spectral bins below the frequency ceiling")
    j = int(np.flatnonzero(valid)[np.argmax(spec[valid])])
    if 0 < j < spec.size - 1:
        y0, y1, y2 = np.log(spec[j - 1 : j + 2] + 1e-300)
        denom = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    else:
        shift = 0.0
    w = (j + shift) * (omega[1] - omega[0])
    duration = abs(t[-1] - t[0])
    periods = duration * w / (2.0 * math.pi)
    if periods < min_periods:
        need = min_periods * 2.0 * math.pi / w
        raise ValueError(
            f"record covers {periods:.1f} secular periods; need >= {min_periods:g}, "
            f"i.e. a duration of at least {need:.4g} s"
        )
    return w


def scan_stability(
    drive_template: DriveConfig,
    r0: float,
    q_e_grid,
    q_I_grid,
    periods: int = 1000,
    *,
    steps_per_period: int = 50,
    offset: float | None = None,
    escape_radius: float | None = None,
) -> np.ndarray:
    """Boundedness of an electron over a (q_e, q_I) grid in the quadrupole field.

    Amplitudes follow from inverting the q definitions at the template's
    frequencies. Every grid point starts at rest with a radial (x) offset
    of ``offset`` (default r0/1000) and is integrated for ``periods``
    periods of the slowest tone that is switched on anywhere in the grid.
    All grid points are advanced together. Returns a boolean matrix with
    rows over q_e.
    """
    q_e_grid = np.atleast_1d(np.asarray(q_e_grid, dtype=float))
    q_I_grid = np.atleast_1d(np.asarray(q_I_grid, dtype=float))
    if q_e_grid.size == 0 or q_I_grid.size == 0:
        raise ValueError("grids must be non-empty")
    if periods < 100:
        raise ValueError("periods must be >= 100")
    d = drive_template
    QE, QI = np.meshgrid(q_e_grid, q_I_grid, indexing="ij")
    Ve = amplitude_for_q(QE.ravel(), d.Omega_e, r0)
    Vi = amplitude_for_q(QI.ravel(), d.Omega_I, r0)
    slow = d.Omega_I if np.any(QI > 0) else d.Omega_e
    h = 2.0 * math.pi / d.fastest_omega / steps_per_period
    _check_step(d, h)
    n_steps = int(math.ceil(periods * 2.0 * math.pi / slow / h))

    P = Ve.size
    offset = r0 * 1e-3 if offset is None else offset
    escape_radius = 10.0 * r0 if escape_radius is None else escape_radius
    x0 = np.zeros((P, 3))
    x0[:, 0] = offset
    qm = -CONSTANTS.elementary_charge / CONSTANTS.electron_mass
    shape = np.array([1.0, 1.0, -2.0]) / r0**2

    def accel(x, t, active):
        Vt = Ve * math.cos(d.Omega_e * t) + Vi * math.cos(d.Omega_I * t + d.phase)
        return -qm * Vt[:, None] * x * shape

    _, _, _, escape = _verlet(x0, np.zeros_like(x0), accel, 0.0, h, n_steps, np.zeros(3), escape_radius)
    return (escape < 0).reshape(QE.shape)


def coulomb_significance(
    electron_energy: float,
    field: FieldModel,
    t_end: float | None = None,
    *,
    ion_charge: float = 2 * CONSTANTS.elementary_charge,
    coulomb_runs: tuple[bool, bool] = (True, False),
    secular_periods: float = 100.0,
    dt: float | None = None,
) -> float:
    """Largest relative difference between two electron trajectories.

    An electron of kinetic energy ``electron_energy`` [eV] starts on a
    circular secular orbit around a Ca2+ ion resting at the trap centre.
    The pair is integrated twice with the Coulomb interaction switched
    according to ``coulomb_runs``; the result is max |x1 - x2| divided by
    the largest electron excursion of the second run. ``t_end`` defaults to
    ``secular_periods`` radial secular periods.
    """
    w = radial_secular_frequency(field)
    if not w > 0:
        raise ValueError("field has no electron confinement (V_e0 = 0)")
    speed = math.sqrt(2.0 * electron_energy * CONSTANTS.elementary_charge / CONSTANTS.electron_mass)
    radius = speed / w
    c = field.center
    if t_end is None:
        t_end = secular_periods * 2.0 * math.pi / w
    if dt is None:
        dt = 2.0 * math.pi / field.drive.fastest_omega / 200.0

    ion = calcium_ion(2, position=c)
    ion.charge = ion_charge
    runs = []
    for flag in coulomb_runs:
        e = electron(position=c + [radius, 0.0, 0.0], velocity=[0.0, speed, 0.0])
        traj = integrate([e, ion], replace(field, coulomb=flag), t_end, dt,
                         escape_radius=10.0 * field.length_scale)[0]
        runs.append(traj)
    a, b = runs
    n = min(a.times.size, b.times.size)
    diff = np.linalg.norm(a.positions[:n] - b.positions[:n], axis=1).max()
    scale = np.linalg.norm(b.positions - c, axis=1).max()
    return float(diff / scale)
