"""Constant-curvature model spaces: metric coefficient, sphere areas, ball volumes.

A model space is the simply connected space form of dimension d and constant
sectional curvature, parametrized by kind (spherical, euclidean, hyperbolic)
and a curvature scale: the sphere radius R for the spherical kind,
1/sqrt(-K) for the hyperbolic kind. Geodesic balls in these spaces are the
comparison domains for everything else in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import InputError

KINDS = ("spherical", "euclidean", "hyperbolic")

# absolute tolerance for generic-dimension volume quadrature
_QUAD_TOL = 1e-12


def sphere_surface_measure(d: int) -> float:
    """Surface measure beta_{d-1} of the unit (d-1)-sphere in R^d.

    beta_0 = 2, beta_1 = 2*pi, beta_2 = 4*pi, ...
    """
    if d < 1:
        raise InputError(f"dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class ModelSpace:
    """Space form of constant curvature.

    curvature_scale is the sphere radius R (spherical) or 1/sqrt(-K)
    (hyperbolic); it is ignored for the euclidean kind.
    """

    kind: str
    dim: int
    curvature_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown model-space kind {self.kind!r}")
        if self.dim < 1:
            raise InputError(f"dimension must be >= 1, got {self.dim}")
        if self.kind != "euclidean" and not self.curvature_scale > 0:
            raise InputError("curvature_scale must be positive")

    @property
    def max_radius(self) -> float:
        """Largest admissible geodesic radius (pi*R on the sphere)."""
        if self.kind == "spherical":
            return math.pi * self.curvature_scale
        return math.inf

    @property
    def total_volume(self) -> float:
        """Volume of the whole space (finite only for the spherical kind)."""
        if self.kind == "spherical":
            return geodesic_ball_volume(self, self.max_radius)
        return math.inf


@dataclass(frozen=True)
class GeodesicBall:
    """Geodesic ball of radius rho about a point of a model space."""

    space: ModelSpace
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InputError("ball radius must be positive")
        if self.radius > self.space.max_radius:
            raise InputError(
                f"radius {self.radius} exceeds max {self.space.max_radius} "
                f"for the {self.space.kind} kind"
            )

    @property
    def volume(self) -> float:
        return geodesic_ball_volume(self.space, self.radius)


def metric_coefficient(space: ModelSpace, t: float) -> float:
    """Warping function s(t) of the model metric dt^2 + s(t)^2 dtheta^2.

    s(t) = R*sin(t/R), t, or a*sinh(t/a) for the spherical, euclidean,
    hyperbolic kinds respectively.
    """
    if t < 0 or t > space.max_radius:
        raise InputError(f"t={t} outside [0, {space.max_radius}]")
    a = space.curvature_scale
    if space.kind == "spherical":
        return a * math.sin(t / a)
    if space.kind == "hyperbolic":
        return a * math.sinh(t / a)
    return t


def geodesic_sphere_area(space: ModelSpace, r: float) -> float:
    """(d-1)-measure of the geodesic sphere of radius r: beta_{d-1} s(r)^{d-1}."""
    s = metric_coefficient(space, r)
    return sphere_surface_measure(space.dim) * s ** (space.dim - 1)


def geodesic_ball_volume(space: ModelSpace, r: float) -> float:
    """Volume of the geodesic ball of radius r.

    Closed forms for d <= 3; adaptive quadrature of the sphere area
    otherwise (absolute tolerance 1e-12).
    """
    if r < 0 or r > space.max_radius:
        raise InputError(f"r={r} outside [0, {space.max_radius}]")
    d = space.dim
    a = space.curvature_scale
    beta = sphere_surface_measure(d)
    if space.kind == "euclidean":
        return beta * r**d / d
    if d == 1:
        return 2.0 * r
    x = r / a
    if space.kind == "spherical":
        if d == 2:
            return 2.0 * math.pi * a**2 * (1.0 - math.cos(x))
        if d == 3:
            return 2.0 * math.pi * a**3 * (x - math.sin(x) * math.cos(x))
    else:
        if d == 2:
            return 2.0 * math.pi * a**2 * (math.cosh(x) - 1.0)
        if d == 3:
            return 2.0 * math.pi * a**3 * (math.sinh(x) * math.cosh(x) - x)
    val, _ = quad(
        lambda t: geodesic_sphere_area(space, t), 0.0, r,
        epsabs=_QUAD_TOL, epsrel=_QUAD_TOL,
    )
    return val


def cap_radius_for_volume(space: ModelSpace, volume: float) -> float:
    """Radius of the geodesic ball with the given volume (inverse of the above).

    Bracketed root-finding; monotone in volume. Raises InputError when the
    volume is outside (0, total volume).
    """
    if not volume > 0:
        raise InputError("volume must be positive")
    if space.kind == "spherical":
        total = space.total_volume
        if volume >= total:
            raise InputError(f"volume {volume} >= total sphere volume {total}")
        lo, hi = 0.0, space.max_radius
    else:
        lo, hi = 0.0, 1.0
        while geodesic_ball_volume(space, hi) < volume:
            hi *= 2.0
    f = lambda r: geodesic_ball_volume(space, r) - volume
    return brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
