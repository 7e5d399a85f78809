"""Radial exit-time moment hierarchy on geodesic balls."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from exitspec import (
    GeodesicBall,
    InputError,
    ModelSpace,
    MomentSequence,
    RadialField,
    geodesic_sphere_area,
    moment_hierarchy_ball,
    pointwise_moment,
    radial_grid,
    radial_poisson_solve,
)

E1 = ModelSpace("euclidean", 1)
E2 = ModelSpace("euclidean", 2)
S2 = ModelSpace("spherical", 2, 1.0)
H2 = ModelSpace("hyperbolic", 2, 1.0)


def test_interval_moments_closed_form():
    # unit interval as the d = 1 ball of radius 1/2
    ball = GeodesicBall(E1, 0.5)
    assert ball.volume == pytest.approx(1.0, rel=1e-14)
    mom, _ = moment_hierarchy_ball(ball, 3)
    assert mom.moments[0] == pytest.approx(1.0 / 12.0, rel=1e-10)
    assert mom.moments[1] == pytest.approx(1.0 / 60.0, rel=1e-10)
    assert mom.moments[2] == pytest.approx(17.0 / 3360.0, rel=1e-10)


def test_disc_moments_closed_form():
    ball = GeodesicBall(E2, 1.0)
    mom, fields = moment_hierarchy_ball(ball, 2)
    assert mom.volume == pytest.approx(math.pi, rel=1e-13)
    assert mom.moments[0] == pytest.approx(math.pi / 8.0, rel=1e-12)
    assert mom.moments[1] == pytest.approx(math.pi / 24.0, rel=1e-12)
    # first field is the mean exit time (1 - r^2) / 4
    r = fields[0].radii
    assert np.max(np.abs(fields[0].values - (1.0 - r * r) / 4.0)) <= 1e-12


def test_hemisphere_moment_and_profile():
    ball = GeodesicBall(S2, math.pi / 2)
    mom, fields = moment_hierarchy_ball(ball, 1)
    assert mom.volume == pytest.approx(2 * math.pi, rel=1e-13)
    assert mom.moments[0] == pytest.approx(2 * math.pi * (2 * math.log(2) - 1), rel=1e-10)
    r = fields[0].radii
    assert np.max(np.abs(fields[0].values - np.log1p(np.cos(r)))) <= 1e-9


def test_hyperbolic_profile_closed_form():
    ball = GeodesicBall(H2, 1.0)
    _, fields = moment_hierarchy_ball(ball, 1)
    r = fields[0].radii
    expect = 2.0 * (math.log(math.cosh(0.5)) - np.log(np.cosh(r / 2.0)))
    assert np.max(np.abs(fields[0].values - expect)) <= 1e-9


def test_pointwise_moment_interpolation():
    disc = GeodesicBall(E2, 1.0)
    _, fields = moment_hierarchy_ball(disc, 1)
    assert pointwise_moment(disc, fields[0], 0.5) == pytest.approx(0.1875, abs=1e-6)
    assert pointwise_moment(disc, fields[0], 1.0) == 0.0
    hemi = GeodesicBall(S2, math.pi / 2)
    _, hf = moment_hierarchy_ball(hemi, 1)
    # center value of the hemisphere exit time
    assert pointwise_moment(hemi, hf[0], 0.0) == pytest.approx(math.log(2.0), abs=1e-9)


def test_hierarchy_energy_mass_invariants():
    # <grad u_k, grad u_k> = (k!)^2 / (2k-1)! T_{2k-1}
    # <u_k, u_k>           = (k!)^2 / (2k)!   T_{2k}
    ball = GeodesicBall(E2, 1.0)
    mom, fields = moment_hierarchy_ball(ball, 8)
    r = fields[0].radii
    area = np.array([geodesic_sphere_area(E2, s) for s in r])
    for k in range(1, 5):
        uk = fields[k - 1].values
        ukm1 = np.ones_like(uk) if k == 1 else fields[k - 2].values
        energy = k * simpson(area * ukm1 * uk, x=r)
        mass = simpson(area * uk * uk, x=r)
        ck = math.factorial(k) ** 2
        expect_e = ck / math.factorial(2 * k - 1) * mom.moments[2 * k - 2]
        expect_m = ck / math.factorial(2 * k) * mom.moments[2 * k - 1]
        assert abs(energy - expect_e) <= 1e-6 * expect_e
        assert abs(mass - expect_m) <= 1e-6 * expect_m


def test_refinement_doubling_order():
    for ball in (GeodesicBall(E2, 1.0), GeodesicBall(S2, math.pi / 2)):
        vals = []
        for n in (512, 1024, 2048):
            m, _ = moment_hierarchy_ball(ball, 1, n_radii=n)
            vals.append(m.moments[0])
        d1 = abs(vals[1] - vals[0])
        d2 = abs(vals[2] - vals[1])
        assert d2 < d1
        assert math.log2(d1 / d2) >= 1.9


def test_moments_decay_and_positivity():
    ball = GeodesicBall(E2, 1.0)
    mom, _ = moment_hierarchy_ball(ball, 6)
    assert np.all(mom.moments > 0)
    # scaled moments T_n / n! decrease once n is past the spectral scale
    scaled = mom.moments / np.array([math.factorial(n) for n in range(1, 7)])
    assert np.all(np.diff(scaled) < 0)


def test_near_full_sphere_ball():
    ball = GeodesicBall(S2, math.pi - 1e-3)
    mom, _ = moment_hierarchy_ball(ball, 1)
    assert mom.volume == pytest.approx(4 * math.pi, rel=1e-5)
    assert mom.moments[0] > 0


def test_radial_grid_shape():
    ball = GeodesicBall(E2, 1.0)
    g = radial_grid(ball, 8)
    assert len(g) == 8
    assert g[0] == 0.0
    assert g[-1] == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(InputError):
        radial_grid(ball, 7)


def test_poisson_solve_nonnegative_rhs_required():
    ball = GeodesicBall(E2, 1.0)
    g = radial_grid(ball, 64)
    with pytest.raises(InputError):
        radial_poisson_solve(ball, RadialField(E2, g, -np.ones_like(g)))


def test_poisson_solve_constant_rhs_is_exit_time():
    ball = GeodesicBall(E2, 1.0)
    g = radial_grid(ball, 513)
    u = radial_poisson_solve(ball, RadialField(E2, g, np.ones_like(g)))
    assert np.max(np.abs(u.values - (1.0 - g * g) / 4.0)) <= 1e-12
    assert u.values[-1] == 0.0


def test_hierarchy_input_validation():
    ball = GeodesicBall(E2, 1.0)
    with pytest.raises(InputError):
        moment_hierarchy_ball(ball, 0)
    with pytest.raises(InputError):
        moment_hierarchy_ball(ball, 2, n_radii=4)


def test_moment_sequence_dict_round_trip():
    ball = GeodesicBall(E2, 1.0)
    mom, _ = moment_hierarchy_ball(ball, 3)
    back = MomentSequence.from_dict(mom.to_dict())
    assert back.volume == mom.volume
    assert np.array_equal(back.moments, mom.moments)
    with pytest.raises(InputError):
        MomentSequence.from_dict({"volume": 1.0})
    with pytest.raises(InputError):
        MomentSequence.from_dict({"volume": 1.0, "moments": "junk"})
    with pytest.raises(InputError):
        MomentSequence(1.0, np.array([0.1, -0.2]))
