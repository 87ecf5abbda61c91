import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from trapforge.geometry import (
    RingGeometry, axis_derivatives, depth_shape, escape_height, golden_section_max,
    height_from_radii, inner_radius_for_height, on_axis_field, on_axis_potential,
    optimize_ratio, pseudopotential_profile, steepness_shape,
)

OMEGA = 2 * math.pi * 2.4e9


def test_height_of_reference_ring():
    assert height_from_radii(1.3e-3, 5.7e-3) == pytest.approx(1.81568e-3, rel=1e-5)


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (2.0, 1.0), (1.0, 1.0), (-1.0, 2.0)])
def test_height_rejects_bad_radii(a, b):
    with pytest.raises(ValueError):
        height_from_radii(a, b)


@given(h=st.floats(1e-5, 1e-1), r=st.floats(1.01, 50.0))
def test_height_inversion(h, r):
    a = inner_radius_for_height(h, r)
    assert height_from_radii(a, r * a) == pytest.approx(h, rel=1e-12)


@given(a=st.floats(1e-5, 1e-1), r=st.floats(1.01, 50.0), s=st.floats(0.1, 10.0))
def test_height_scales_with_size(a, r, s):
    assert height_from_radii(s * a, s * r * a) == pytest.approx(s * height_from_radii(a, r * a),
                                                                rel=1e-12)


def test_null_is_root_of_axial_field():
    # independent oracle: brute minimisation of |E_z| on the axis
    g = RingGeometry(1.3e-3, 5.7e-3)
    res = minimize_scalar(lambda z: on_axis_field(g, 1.0, z) ** 2,
                          bounds=(0.1 * g.inner_radius, g.outer_radius), method="bounded",
                          options={"xatol": 1e-13})
    assert res.x == pytest.approx(g.height, rel=1e-7)
    assert abs(on_axis_field(g, 1.0, g.height)) < 1e-9 * abs(on_axis_field(g, 1.0, 0.0))


def test_escape_height_is_field_maximum():
    g = RingGeometry(1.3e-3, 5.7e-3)
    res = minimize_scalar(lambda z: -on_axis_field(g, 1.0, z) ** 2,
                          bounds=(g.height * 1.01, 5 * g.outer_radius), method="bounded",
                          options={"xatol": 1e-13})
    assert escape_height(g) == pytest.approx(res.x, rel=1e-7)


def test_axis_derivatives_match_finite_differences():
    g = RingGeometry(1.0e-3, 4.5e-3)
    z, hz = 1.7e-3, 1e-7
    d1, d2, d3 = axis_derivatives(g, z)
    phi = lambda x: on_axis_potential(g, 1.0, x)
    assert d1 == pytest.approx((phi(z + hz) - phi(z - hz)) / (2 * hz), rel=1e-6)
    D1 = lambda x: axis_derivatives(g, x)[0]
    D2 = lambda x: axis_derivatives(g, x)[1]
    assert d2 == pytest.approx((D1(z + hz) - D1(z - hz)) / (2 * hz), rel=1e-6)
    assert d3 == pytest.approx((D2(z + hz) - D2(z - hz)) / (2 * hz), rel=1e-6)


def test_potential_vanishes_on_plane_and_far_away():
    g = RingGeometry(1.0e-3, 4.0e-3)
    assert on_axis_potential(g, 10.0, 0.0) == 0.0
    assert abs(on_axis_potential(g, 10.0, 10.0)) < 1e-6


def test_optimal_ratios():
    assert optimize_ratio("steepness") == pytest.approx(4.47, abs=0.01)
    assert optimize_ratio("depth") == pytest.approx(5.49, abs=0.01)


def test_optimizer_matches_scipy_bounded_search():
    for f, metric in ((steepness_shape, "steepness"), (depth_shape, "depth")):
        ref = minimize_scalar(lambda r: -f(r), bounds=(1.5, 20), method="bounded",
                              options={"xatol": 1e-9}).x
        assert optimize_ratio(metric, tolerance=1e-8) == pytest.approx(ref, abs=1e-5)


def test_optimizer_flags_unbracketed_interval():
    with pytest.raises(ValueError, match="not bracketed"):
        optimize_ratio("steepness", (6.0, 20.0))
    with pytest.raises(ValueError, match="metric"):
        optimize_ratio("width")
    with pytest.raises(ValueError):
        optimize_ratio("depth", (0.5, 3.0))


def test_golden_section_on_parabola():
    assert golden_section_max(lambda x: -(x - 0.3) ** 2, -1, 2, 1e-9) == pytest.approx(0.3,
                                                                                       abs=1e-8)


def test_shape_functions_domain():
    with pytest.raises(ValueError):
        depth_shape(1.0)
    with pytest.raises(ValueError):
        steepness_shape(np.array([2.0, 0.5]))
    assert depth_shape(np.array([2.0, 3.0])).shape == (2,)


def _profile(r, h=1e-3, V=100.0, species=None, n=4000):
    g = RingGeometry.from_height(h, r)
    z = np.linspace(0, 6 * g.outer_radius, n)
    return g, pseudopotential_profile(g, V, OMEGA, species, z)


def test_profile_landmarks_match_closed_forms(electron_species):
    g, p = _profile(4.38, species=electron_species)
    assert p.field_null_height == pytest.approx(g.height, rel=1e-9)
    assert p.turning_point == pytest.approx(escape_height(g), rel=1e-6)
    assert p.steepness == pytest.approx(p.depth / (p.turning_point - p.field_null_height))
    assert p.depth_K == pytest.approx(p.depth / 1.380649e-23)


@pytest.mark.parametrize("r", [3.0, 4.47, 5.49, 8.0])
def test_depth_follows_shape_law(r, electron_species):
    _, ref = _profile(5.49, species=electron_species)
    _, p = _profile(r, species=electron_species)
    assert p.depth / ref.depth == pytest.approx(depth_shape(r) / depth_shape(5.49), rel=1e-6)


def test_depth_independent_of_grid_density(electron_species):
    _, coarse = _profile(4.0, species=electron_species, n=600)
    _, fine = _profile(4.0, species=electron_species, n=20000)
    assert coarse.depth == pytest.approx(fine.depth, rel=1e-9)


def test_profile_scaling_laws(electron_species):
    g = RingGeometry(1.3e-3, 5.7e-3)
    z = np.linspace(0, 6 * g.outer_radius, 3000)
    p1 = pseudopotential_profile(g, 50.0, OMEGA, electron_species, z)
    p2 = pseudopotential_profile(g, 100.0, OMEGA, electron_species, z)
    p3 = pseudopotential_profile(g, 50.0, 2 * OMEGA, electron_species, z)
    assert p2.depth == pytest.approx(4 * p1.depth, rel=1e-12)
    assert p3.depth == pytest.approx(p1.depth / 4, rel=1e-12)
    assert p2.secular_frequency == pytest.approx(2 * p1.secular_frequency, rel=1e-12)


def test_axial_secular_frequency_from_profile_curvature(electron_species):
    g, p = _profile(4.47, species=electron_species, n=200001)
    i = int(np.argmin(np.abs(p.z_samples - p.field_null_height)))
    dz = p.z_samples[1] - p.z_samples[0]
    curv = (p.pseudopotential[i + 1] - 2 * p.pseudopotential[i] + p.pseudopotential[i - 1]) / dz**2
    assert math.sqrt(curv / electron_species.mass) == pytest.approx(p.secular_frequency, rel=1e-3)


def test_zero_amplitude_gives_flat_profile(electron_species):
    _, p = _profile(4.47, V=0.0, species=electron_species)
    assert p.depth == 0.0
    assert not np.any(p.pseudopotential)


def test_profile_grid_validation(electron_species):
    g = RingGeometry(1.3e-3, 5.7e-3)
    with pytest.raises(ValueError, match="span"):
        pseudopotential_profile(g, 1.0, OMEGA, electron_species, np.linspace(0, 1e-3, 100))
    with pytest.raises(ValueError, match="increasing"):
        pseudopotential_profile(g, 1.0, OMEGA, electron_species, np.linspace(0.1, 0, 100))
    with pytest.raises(ValueError, match="coarse"):
        pseudopotential_profile(g, 1.0, OMEGA, electron_species, np.array([0, 0.015, 0.03, 0.04]))


@settings(max_examples=25, deadline=None)
@given(r=st.floats(1.5, 15.0))
def test_geometry_from_height_round_trip(r):
    g = RingGeometry.from_height(2e-3, r)
    assert g.ratio == pytest.approx(r, rel=1e-12)
    assert g.height == pytest.approx(2e-3, rel=1e-12)
    assert g.r0 == g.height
    assert RingGeometry(1e-3, 2e-3, characteristic_dim=5e-4).r0 == 5e-4
