"""Poisson hierarchy on geodesic balls via the radial representation.

On a ball of radius rho in a model space, the solution of -Lap v = f with
v(rho) = 0 and radial f is

    v(r) = int_r^rho s(tau)^(1-d) int_0^tau s(xi)^(d-1) f(xi) dxi dtau,

evaluated here by two cumulative quadrature passes on a uniform radial grid.
Iterating with f = n*u_{n-1}, u_0 = 1 produces the exit-time moment fields
u_n and the moment sequence T_n = int u_n dV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import InputError
from .model_space import (
    GeodesicBall,
    geodesic_ball_volume,
    sphere_surface_measure,
)
from .rearrange import RadialField

DEFAULT_N_RADII = 4096


@dataclass(frozen=True)
class MomentSequence:
    """Moments T_1..T_N of a domain of the given volume.

    tail_bounds, when present, bounds the truncation error of each T_n for
    sequences synthesized from a finite spectral sum.
    """

    volume: float
    moments: np.ndarray
    tail_bounds: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        m = np.asarray(self.moments, dtype=float)
        object.__setattr__(self, "moments", m)
        if m.ndim != 1 or m.size < 1:
            raise InputError("moments must be a nonempty 1-D array")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise InputError("moments must be positive and finite")
        if not self.volume > 0:
            raise InputError("volume must be positive")

    @property
    def n_max(self) -> int:
        return len(self.moments)

    def to_dict(self) -> dict:
        return {"volume": self.volume, "moments": [float(t) for t in self.moments]}

    @classmethod
    def from_dict(cls, d: dict) -> "MomentSequence":
        try:
            return cls(volume=float(d["volume"]), moments=np.asarray(d["moments"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed moment sequence: {exc}") from exc


def radial_grid(ball: GeodesicBall, n_radii: int = DEFAULT_N_RADII) -> np.ndarray:
    if n_radii < 8:
        raise InputError("n_radii must be >= 8")
    return np.linspace(0.0, ball.radius, n_radii)


def _metric_profile(ball: GeodesicBall, r: np.ndarray) -> np.ndarray:
    a = ball.space.curvature_scale
    kind = ball.space.kind
    if kind == "spherical":
        return a * np.sin(r / a)
    if kind == "hyperbolic":
        return a * np.sinh(r / a)
    return r.copy()


def radial_poisson_solve(ball: GeodesicBall, rhs: RadialField) -> RadialField:
    """Solve -Lap v = rhs on the ball with v = 0 at the boundary.

    rhs must be sampled on the ball's uniform radial grid and be nonnegative
    (the pointwise comparison downstream assumes f >= 0, which also makes v
    nonincreasing). Two cumulative Simpson passes; the integrand
    s^(1-d)(tau) * int_0^tau s^(d-1) f is regular at tau = 0 with series value
    tau*f(0)/d, used for the first grid cell.
    """
    r = rhs.radii
    if abs(r[-1] - ball.radius) > 1e-12 * ball.radius:
        raise InputError("rhs grid does not span the ball radius")
    h = r[1] - r[0]
    if np.max(np.abs(np.diff(r) - h)) > 1e-12 * h:
        raise InputError("rhs grid must be uniform")
    f = rhs.values
    if np.any(f < 0):
        raise InputError("rhs must be nonnegative")
    d = ball.space.dim
    s = _metric_profile(ball, r)
    sd = s ** (d - 1)
    inner = cumulative_simpson(sd * f, dx=h, initial=0.0)
    if d == 1:
        g = inner
    else:
        g = np.zeros_like(inner)
        g[1:] = inner[1:] / sd[1:]
        g[1] = r[1] * f[0] / d
    outer = cumulative_simpson(g, dx=h, initial=0.0)
    v = outer[-1] - outer
    v[-1] = 0.0
    return RadialField(ball.space, r, v)


def moment_hierarchy_ball(
    ball: GeodesicBall, N: int, n_radii: int = DEFAULT_N_RADII
) -> tuple[MomentSequence, list[RadialField]]:
    """Moment fields u_1..u_N and their integrals T_n over the ball.

    u_n solves -Lap u_n = n*u_{n-1} with u_0 = 1 and zero boundary values;
    T_n = int u_n dV by metric-weighted quadrature.
    """
    if N < 1:
        raise InputError("N must be >= 1")
    r = radial_grid(ball, n_radii)
    h = r[1] - r[0]
    d = ball.space.dim
    s = _metric_profile(ball, r)
    sd = s ** (d - 1)
    beta = sphere_surface_measure(d)
    u_prev = RadialField(ball.space, r, np.ones_like(r))
    fields: list[RadialField] = []
    moments = np.empty(N)
    for n in range(1, N + 1):
        rhs = RadialField(ball.space, r, n * u_prev.values)
        u_n = radial_poisson_solve(ball, rhs)
        moments[n - 1] = beta * cumulative_simpson(sd * u_n.values, dx=h, initial=0.0)[-1]
        fields.append(u_n)
        u_prev = u_n
    volume = geodesic_ball_volume(ball.space, ball.radius)
    return MomentSequence(volume=volume, moments=moments), fields


def pointwise_moment(ball: GeodesicBall, u_n: RadialField, r: float) -> float:
    """Interpolated u_n(r), the n-th exit-time moment started at radius r."""
    if r < 0 or r > ball.radius * (1 + 1e-12):
        raise InputError(f"r={r} outside [0, {ball.radius}]")
    return float(np.interp(r, u_n.radii, u_n.values))
