"""Constant-curvature model spaces: volumes, areas, cap radii."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from exitspec import GeodesicBall, InputError, ModelSpace, cap_radius_for_volume
from exitspec import geodesic_ball_volume, geodesic_sphere_area


def test_kind_validation():
    with pytest.raises(InputError):
        ModelSpace("flat", 2)
    with pytest.raises(InputError):
        ModelSpace("euclidean", 0)
    with pytest.raises(InputError):
        ModelSpace("spherical", 2, 0.0)
    with pytest.raises(InputError):
        ModelSpace("spherical", 2, -1.0)


def test_euclidean_ball_volumes():
    e1 = ModelSpace("euclidean", 1)
    e2 = ModelSpace("euclidean", 2)
    e3 = ModelSpace("euclidean", 3)
    # d = 1 balls are intervals of length 2r
    assert geodesic_ball_volume(e1, 0.5) == pytest.approx(1.0, rel=1e-14)
    assert geodesic_ball_volume(e2, 1.0) == pytest.approx(math.pi, rel=1e-14)
    assert geodesic_ball_volume(e3, 2.0) == pytest.approx(32 * math.pi / 3, rel=1e-14)


def test_spherical_ball_volume_closed_form():
    s2 = ModelSpace("spherical", 2, 1.0)
    # area of a polar cap of radius rho on the unit sphere
    for rho in (0.3, math.pi / 3, math.pi / 2, 2.5):
        assert geodesic_ball_volume(s2, rho) == pytest.approx(
            2 * math.pi * (1 - math.cos(rho)), rel=1e-13)
    assert geodesic_ball_volume(s2, math.pi / 2) == pytest.approx(2 * math.pi, rel=1e-14)


def test_hyperbolic_ball_volume_closed_form():
    h2 = ModelSpace("hyperbolic", 2, 1.0)
    for rho in (0.2, 1.0, 3.0):
        assert geodesic_ball_volume(h2, rho) == pytest.approx(
            2 * math.pi * (math.cosh(rho) - 1), rel=1e-13)


def test_ball_volume_matches_area_integral():
    # volume must equal the integral of the geodesic sphere areas
    spaces = [
        ModelSpace("euclidean", 3),
        ModelSpace("spherical", 3, 2.0),
        ModelSpace("hyperbolic", 3, 0.7),
        ModelSpace("spherical", 4, 1.0),
    ]
    for space in spaces:
        rho = 1.1
        val, err = quad(lambda r: geodesic_sphere_area(space, r), 0.0, rho,
                        epsabs=1e-13, epsrel=1e-13)
        assert geodesic_ball_volume(space, rho) == pytest.approx(val, rel=1e-10)


def test_sphere_area_scaling():
    e2 = ModelSpace("euclidean", 2)
    assert geodesic_sphere_area(e2, 1.5) == pytest.approx(2 * math.pi * 1.5, rel=1e-14)
    s2 = ModelSpace("spherical", 2, 2.0)
    # circumference of a geodesic circle: 2 pi R sin(r / R)
    assert geodesic_sphere_area(s2, 1.0) == pytest.approx(
        2 * math.pi * 2.0 * math.sin(0.5), rel=1e-13)


def test_total_volume_and_max_radius():
    s2 = ModelSpace("spherical", 2, 1.0)
    assert s2.total_volume == pytest.approx(4 * math.pi, rel=1e-14)
    assert s2.max_radius == pytest.approx(math.pi, rel=1e-14)
    e2 = ModelSpace("euclidean", 2)
    assert math.isinf(e2.total_volume)
    assert math.isinf(e2.max_radius)
    h3 = ModelSpace("hyperbolic", 3, 1.0)
    assert math.isinf(h3.total_volume)


def test_geodesic_ball_radius_validation():
    s2 = ModelSpace("spherical", 2, 1.0)
    with pytest.raises(InputError):
        GeodesicBall(s2, 4.0)
    with pytest.raises(InputError):
        GeodesicBall(s2, 0.0)
    ball = GeodesicBall(s2, math.pi / 2)
    assert ball.volume == pytest.approx(2 * math.pi, rel=1e-14)


def test_cap_radius_round_trip():
    spaces = [
        ModelSpace("euclidean", 2),
        ModelSpace("euclidean", 3),
        ModelSpace("spherical", 2, 1.0),
        ModelSpace("spherical", 3, 1.3),
        ModelSpace("hyperbolic", 2, 1.0),
    ]
    rng = np.random.RandomState(7)
    for space in spaces:
        rmax = 2.5 if math.isinf(space.max_radius) else 0.999 * space.max_radius
        for rho in rng.uniform(0.05, rmax, size=5):
            vol = geodesic_ball_volume(space, rho)
            back = cap_radius_for_volume(space, vol)
            assert abs(back - rho) <= 1e-10 * max(1.0, rho)


def test_cap_radius_known_fractions():
    s2 = ModelSpace("spherical", 2, 1.0)
    # half the sphere is the hemisphere, a quarter is the 60 degree cap
    assert cap_radius_for_volume(s2, 2 * math.pi) == pytest.approx(math.pi / 2, abs=1e-12)
    assert cap_radius_for_volume(s2, math.pi) == pytest.approx(math.pi / 3, abs=1e-12)


def test_cap_radius_near_full_sphere():
    s2 = ModelSpace("spherical", 2, 1.0)
    rho = cap_radius_for_volume(s2, 4 * math.pi * (1 - 1e-12))
    assert rho <= math.pi
    assert rho > math.pi - 1e-4


def test_cap_radius_validation():
    s2 = ModelSpace("spherical", 2, 1.0)
    with pytest.raises(InputError):
        cap_radius_for_volume(s2, 0.0)
    with pytest.raises(InputError):
        cap_radius_for_volume(s2, 5 * math.pi)
