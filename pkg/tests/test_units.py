import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from trapforge.units import (
    CONSTANTS, DIMENSIONS, Quantity, UnitError, au_to_si, format_quantity, parse_quantity,
    si_to_au, skin_depth,
)


def test_hartree_is_consistent_with_bohr_and_electron_mass():
    c = CONSTANTS
    derived = c.reduced_planck**2 / (c.electron_mass * c.bohr_radius**2)
    assert derived == pytest.approx(c.hartree_energy, rel=1e-9)


def test_atomic_time_unit_is_hbar_over_hartree():
    assert CONSTANTS.reduced_planck / CONSTANTS.hartree_energy == pytest.approx(
        CONSTANTS.au_time, rel=1e-10
    )


def test_one_bohr_round_trips_to_one_au():
    q = si_to_au(Quantity(CONSTANTS.bohr_radius, "length"))
    assert q.value == pytest.approx(1.0, rel=1e-15)
    assert q.dimension == "length"


@pytest.mark.parametrize("dim", ["length", "energy", "time", "angular-frequency"])
@given(x=st.floats(1e-30, 1e30))
def test_si_au_round_trip(dim, x):
    back = au_to_si(si_to_au(Quantity(x, dim)))
    assert back.value == pytest.approx(x, rel=1e-14)


@pytest.mark.parametrize("dim", ["voltage", "temperature", "resistivity"])
def test_unsupported_conversion_names_dimension(dim):
    with pytest.raises(ValueError, match=dim):
        si_to_au(Quantity(1.0, dim))


def test_unknown_dimension_rejected():
    with pytest.raises(ValueError):
        Quantity(1.0, "furlongs")
    assert "length" in DIMENSIONS


def test_skin_depth_copper_at_microwave():
    # 1.7e-8 ohm m at 2.4 GHz is about 1.3 um
    d = skin_depth(1.7e-8, 2 * math.pi * 2.4e9)
    assert d == pytest.approx(1.34e-6, rel=0.01)


def test_skin_depth_scaling():
    d1 = skin_depth(2.4e-8, 1e7)
    assert skin_depth(4 * 2.4e-8, 1e7) == pytest.approx(2 * d1, rel=1e-15)
    assert skin_depth(2.4e-8, 4e7) == pytest.approx(d1 / 2, rel=1e-15)
    assert isinstance(skin_depth(np.array([1e-8, 2e-8]), 1e7), np.ndarray)


@pytest.mark.parametrize("rho,omega", [(0.0, 1.0), (1e-8, 0.0), (-1e-8, 1.0)])
def test_skin_depth_domain(rho, omega):
    with pytest.raises(ValueError):
        skin_depth(rho, omega)


@pytest.mark.parametrize(
    "text,dim,expected",
    [
        ("1.3 mm", "length", 1.3e-3),
        ("10 um", "length", 1e-5),
        ("2.37 GHz", "angular-frequency", 2 * math.pi * 2.37e9),
        ("1e-4 au", "angular-frequency", 1e-4 / CONSTANTS.au_time),
        ("5 rad/s", "angular-frequency", 5.0),
        ("7.3 MHz", "frequency", 7.3e6),
        ("10 meV", "energy", 1e-2 * CONSTANTS.elementary_charge),
        ("400 mK", "temperature", 0.4),
        ("2.4e-8 ohm*m", "resistivity", 2.4e-8),
        ("90 deg", "angle", math.pi / 2),
        ("2", "dimensionless", 2.0),
    ],
)
def test_parse_quantity(text, dim, expected):
    assert parse_quantity(text, dim) == pytest.approx(expected, rel=1e-15)


def test_parse_rejects_missing_and_unknown_units():
    with pytest.raises(UnitError, match="missing unit"):
        parse_quantity("1.3", "length")
    with pytest.raises(UnitError, match="unknown unit 'furlong'"):
        parse_quantity("1.3 furlong", "length")
    with pytest.raises(UnitError):
        parse_quantity("abc mm", "length")
    with pytest.raises(UnitError):
        parse_quantity("2 mm", "dimensionless")


@given(x=st.floats(allow_nan=False, allow_infinity=False),
       dim=st.sampled_from(["length", "voltage", "angular-frequency", "dimensionless"]))
def test_format_parse_round_trip_is_exact(x, dim):
    assert parse_quantity(format_quantity(x, dim), dim) == x
