import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circlepattern import (
    Geometry,
    GeometryRangeError,
    build_complex,
    character,
    cone_angle,
    cone_angles,
    curvature_vector,
    edge_length,
    euler_characteristic,
    gauss_bonnet_residual,
    hyperbolic_area,
    inner_angle,
    inner_angle_gradient,
    triangulate,
)
from circlepattern.constructions import icosahedron, random_b1_weights
from circlepattern.geometry import log_to_radii, radii_to_log

from .oracles import (
    central_difference,
    law_of_cosines_angle,
    law_of_cosines_length,
    octagon_radius,
    pattern_state_sums,
)

PI = math.pi
GEOMS = ["euclidean", "hyperbolic"]

radius = st.floats(0.01, 10.0)
angle = st.floats(0.05, PI - 0.05)


# edge length ---------------------------------------------------------------

@pytest.mark.parametrize("g, args, expected", [
    ("euclidean", (1, 1, PI / 2), math.sqrt(2)),
    ("euclidean", (1, 1, PI / 3), math.sqrt(3)),
    # arcosh(cosh(1)^2), 50-digit reference
    ("hyperbolic", (1, 1, PI / 2), 1.513374006596504),
])
def test_edge_length_values(g, args, expected):
    assert edge_length(g, *args) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(g=st.sampled_from(GEOMS), ri=radius, rj=radius, phi=angle)
def test_edge_length_matches_cosine_law(g, ri, rj, phi):
    assert edge_length(g, ri, rj, phi) == pytest.approx(law_of_cosines_length(g, ri, rj, phi), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(g=st.sampled_from(GEOMS), ri=radius, rj=radius, phi=angle)
def test_triangle_inequalities(g, ri, rj, phi):
    l = edge_length(g, ri, rj, phi)
    assert l < ri + rj
    assert ri < l + rj
    assert rj < l + ri


# inner angle ---------------------------------------------------------------

@settings(max_examples=300, deadline=None)
@given(g=st.sampled_from(GEOMS), ri=radius, rj=radius, phi=angle)
def test_inner_angle_matches_cosine_law(g, ri, rj, phi):
    theta = inner_angle(g, ri, rj, phi)
    assert 0 < theta < PI
    assert theta == pytest.approx(law_of_cosines_angle(g, ri, rj, phi), rel=1e-11, abs=1e-14)


@pytest.mark.parametrize("t", [1e-6, 0.3, 1.0, 7.0, 1e4])
@pytest.mark.parametrize("phi", [0.1, PI / 2, 3.0])
def test_euclidean_equal_radii_gives_half_angle(t, phi):
    assert inner_angle("euclidean", t, t, phi) == pytest.approx(phi / 2, rel=1e-14)


def test_euclidean_right_angle_example():
    assert inner_angle("euclidean", 1, 1, PI / 2) == pytest.approx(PI / 4, rel=1e-15)


@pytest.mark.parametrize("phi", [0.2, PI / 2, 3 * PI / 4])
def test_hyperbolic_equal_radii_limits(phi):
    assert inner_angle("hyperbolic", 1e-9, 1e-9, phi) == pytest.approx(phi / 2, rel=1e-12)
    assert inner_angle("hyperbolic", 39.0, 39.0, phi) < 1e-15


@pytest.mark.parametrize("phi", [0.2, 1.0, PI / 2, 2.5])
def test_hyperbolic_equal_radii_strictly_decreasing(phi):
    t = np.linspace(0.01, 20, 400)
    theta = np.array([inner_angle("hyperbolic", x, x, phi) for x in t])
    assert np.all(np.diff(theta) < 0)


@settings(max_examples=300, deadline=None)
@given(g=st.sampled_from(GEOMS), a=radius, b=radius, phi=angle)
def test_comparison_principle(g, a, b, phi):
    lo, hi = min(a, b), max(a, b)
    # angle at the smaller circle grows when the other circle grows
    assert inner_angle(g, lo, hi, phi) >= inner_angle(g, lo, lo, phi) - 1e-15
    assert inner_angle(g, lo, hi, phi) >= inner_angle(g, hi, hi, phi) - 1e-15
    assert inner_angle(g, hi, lo, phi) <= inner_angle(g, hi, hi, phi) + 1e-15
    assert inner_angle(g, hi, lo, phi) <= inner_angle(g, lo, lo, phi) + 1e-15


@settings(max_examples=200, deadline=None)
@given(ri=radius, rj=radius, phi=angle, scale=st.floats(1e-3, 1e3))
def test_euclidean_scale_invariance(ri, rj, phi, scale):
    assert inner_angle("euclidean", scale * ri, scale * rj, phi) == pytest.approx(
        inner_angle("euclidean", ri, rj, phi), rel=1e-13)


# gradient ------------------------------------------------------------------

def test_gradient_right_angle_example():
    gi, gj = inner_angle_gradient("euclidean", 1, 1, PI / 2)
    assert gi == pytest.approx(-0.5, rel=1e-14)
    assert gj == pytest.approx(0.5, rel=1e-14)


@pytest.mark.parametrize("g", GEOMS)
def test_gradient_matches_extended_precision_differences(g):
    rng = np.random.default_rng(7)
    ri = rng.uniform(0.01, 10, 100)
    rj = rng.uniform(0.01, 10, 100)
    phi = rng.uniform(0.05, PI - 0.05, 100)
    gi, gj = inner_angle_gradient(g, ri, rj, phi)
    for k in range(100):
        fi = central_difference(g, ri[k], rj[k], phi[k], 1e-6, 0)
        fj = central_difference(g, ri[k], rj[k], phi[k], 1e-6, 1)
        assert abs(gi[k] - fi) < 1e-6 * abs(fi)
        assert abs(gj[k] - fj) < 1e-6 * abs(fj)


@settings(max_examples=300, deadline=None)
@given(g=st.sampled_from(GEOMS), ri=radius, rj=radius, phi=angle)
def test_gradient_signs(g, ri, rj, phi):
    gi, gj = inner_angle_gradient(g, ri, rj, phi)
    assert gi < 0 < gj


def test_gradient_vectorised_matches_scalar():
    ri, rj, phi = np.array([0.5, 2.0]), np.array([1.5, 0.1]), np.array([1.0, 2.0])
    gi, gj = inner_angle_gradient("hyperbolic", ri, rj, phi)
    for k in range(2):
        si, sj = inner_angle_gradient("hyperbolic", ri[k], rj[k], phi[k])
        assert (gi[k], gj[k]) == (si, sj)


# range guards --------------------------------------------------------------

@pytest.mark.parametrize("fn", [edge_length, inner_angle, inner_angle_gradient])
@pytest.mark.parametrize("args", [
    ("euclidean", 1e-13, 1.0, 1.0),
    ("euclidean", 1.0, -1.0, 1.0),
    ("euclidean", 1.0, 1.0, 0.0),
    ("euclidean", 1.0, 1.0, PI),
    ("hyperbolic", 41.0, 1.0, 1.0),
    ("hyperbolic", 1.0, float("inf"), 1.0),
])
def test_range_errors(fn, args):
    with pytest.raises(GeometryRangeError):
        fn(*args)


def test_geometry_parse():
    assert Geometry.parse("Hyperbolic") is Geometry.HYPERBOLIC
    assert Geometry.parse(Geometry.EUCLIDEAN) is Geometry.EUCLIDEAN
    with pytest.raises(ValueError):
        Geometry.parse("spherical")


# log coordinates -----------------------------------------------------------

@pytest.mark.parametrize("g", GEOMS)
def test_log_round_trip(g):
    r = np.array([1e-9, 1e-3, 0.5, 1.0, 3.0, 20.0])
    assert np.allclose(log_to_radii(g, radii_to_log(g, r)), r, rtol=1e-12, atol=0)


def test_hyperbolic_log_inverse_deep_collapse():
    # u = ln tanh(r/2) ~ ln(r/2) for tiny r
    assert log_to_radii("hyperbolic", np.array([-200.0]))[0] == pytest.approx(2 * math.exp(-200), rel=1e-14)


# cone angles and curvature -------------------------------------------------

def test_cone_angle_equals_character_at_unit_radii(any_fixture):
    _, c, tri = any_fixture
    a = cone_angles(tri, "euclidean", np.ones(c.vertex_count))
    assert np.allclose(a, character(c).values, atol=1e-13)


def test_cone_angle_equals_character_random_weights(rng):
    c = random_b1_weights(build_complex(icosahedron()), rng)
    a = cone_angles(triangulate(c), "euclidean", np.ones(12))
    assert np.allclose(a, character(c).values, atol=1e-13)


@pytest.mark.parametrize("scale", [0.01, 1.0, 2.0, 300.0])
def test_torus_constant_radii_flat(torus, scale):
    k = curvature_vector(triangulate(torus), "euclidean", np.full(9, scale)).values
    assert np.max(np.abs(k)) < 1e-13


def test_tetrahedron_unit_radii(tetra):
    k = curvature_vector(triangulate(tetra), "euclidean", np.ones(4)).values
    assert np.allclose(k, PI, atol=1e-14)
    assert math.fsum(k) == pytest.approx(4 * PI, abs=1e-13)
    assert abs(gauss_bonnet_residual(tetra, triangulate(tetra), "euclidean", np.ones(4))) < 1e-13


def test_octagon_cone_angle_at_oracle_radius(octagon):
    r_star = octagon_radius()
    assert cone_angle(triangulate(octagon), "hyperbolic", [r_star], 0) == pytest.approx(2 * PI, abs=1e-12)
    assert hyperbolic_area(triangulate(octagon), [r_star]) == pytest.approx(4 * PI, abs=1e-10)


def test_curvature_against_direct_summation(any_fixture, rng):
    _, c, tri = any_fixture
    for g in GEOMS:
        r = rng.uniform(0.2, 3.0, c.vertex_count)
        k_ref, area_ref = pattern_state_sums(c, g, r)
        assert np.allclose(curvature_vector(tri, g, r).values, k_ref, atol=1e-11)
        if g == "hyperbolic":
            assert hyperbolic_area(tri, r) == pytest.approx(area_ref, abs=1e-11)


def test_scale_invariance_of_euclidean_curvature(any_fixture, rng):
    _, c, tri = any_fixture
    r = rng.uniform(0.1, 5, c.vertex_count)
    k1 = curvature_vector(tri, "euclidean", r).values
    k2 = curvature_vector(tri, "euclidean", 17.5 * r).values
    assert np.allclose(k1, k2, atol=1e-13)


def test_curvature_shape_guard(tetra):
    with pytest.raises(GeometryRangeError):
        curvature_vector(triangulate(tetra), "euclidean", np.ones(3))


# Gauss-Bonnet and area -----------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), g=st.sampled_from(GEOMS))
def test_gauss_bonnet_on_random_weighted_icosahedron(seed, g):
    rng = np.random.default_rng(seed)
    c = random_b1_weights(build_complex(icosahedron()), rng)
    tri = triangulate(c)
    r = np.exp(rng.uniform(-3, 2.5, 12))
    assert abs(gauss_bonnet_residual(c, tri, g, r)) < 1e-10
    if g == "hyperbolic":
        k = curvature_vector(tri, g, r).values
        assert math.fsum(k) == pytest.approx(2 * PI * euler_characteristic(c) + hyperbolic_area(tri, r), abs=1e-10)


def test_area_positive_and_vanishing(any_fixture, rng):
    _, c, tri = any_fixture
    for _ in range(20):
        r = np.exp(rng.uniform(-4, 2.5, c.vertex_count))
        assert hyperbolic_area(tri, r) > 0
    areas = [hyperbolic_area(tri, np.full(c.vertex_count, t)) for t in (1e-2, 1e-4, 1e-6)]
    assert areas[0] > areas[1] > areas[2]
    assert areas[2] < 1e-10
