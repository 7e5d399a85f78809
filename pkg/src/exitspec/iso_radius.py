"""Comparison-sphere radius from a Ricci lower bound, dimension, and diameter.

Given Ric >= (d-1)K on a closed d-manifold M of diameter diam, the
isoperimetric comparison sphere is S^d(R) with

    K > 0:  R = (1/sqrt(K)) * (2 I_cos(diam*sqrt(K)/2) / I_sin)^(1/d)
    K = 0:  R = diam / ((1 + d*I_sin)^(1/d) - 1)
    K < 0:  R = 1 / (sqrt(-K) * C(diam*sqrt(-K)))

where I_sin = int_0^pi sin^(d-1), I_cos(z) = int_0^z cos^(d-1), and C(z) is
the unique positive root of x * int_0^z (cosh t + x*sinh t)^(d-1) dt = I_sin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import InputError

_QUAD_TOL = 1e-13


@dataclass(frozen=True)
class RicciBoundInput:
    """Curvature bound K, dimension d >= 2, and manifold diameter."""

    K: float
    dim: int
    diam: float

    def __post_init__(self):
        if self.dim < 2:
            raise InputError(f"dimension must be >= 2, got {self.dim}")
        if not self.diam > 0:
            raise InputError("diameter must be positive")
        if self.K > 0 and self.diam > math.pi / math.sqrt(self.K) * (1 + 1e-12):
            raise InputError(
                f"diam {self.diam} exceeds pi/sqrt(K) = "
                f"{math.pi / math.sqrt(self.K)}; no closed manifold does this"
            )


def sin_power_integral(d: int) -> float:
    """int_0^pi sin^(d-1) theta dtheta = sqrt(pi)*Gamma(d/2)/Gamma((d+1)/2)."""
    return math.sqrt(math.pi) * math.gamma(d / 2.0) / math.gamma((d + 1) / 2.0)


def isoperimetric_constant(z: float, d: int) -> float:
    """Unique x > 0 with x * int_0^z (cosh t + x*sinh t)^(d-1) dt = int_0^pi sin^(d-1).

    The left side is strictly increasing in x, so a bracketed root-finder on a
    geometrically expanded bracket converges; x blows up like const/z as z -> 0.
    """
    if not z > 0:
        raise InputError("z must be positive")
    if d < 2:
        raise InputError(f"dimension must be >= 2, got {d}")
    target = sin_power_integral(d)

    def lhs(x: float) -> float:
        val, _ = quad(
            lambda t: (math.cosh(t) + x * math.sinh(t)) ** (d - 1),
            0.0, z, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL,
        )
        return x * val

    lo = 1e-12
    hi = max(2.0 / z, 10.0)
    while lhs(hi) < target:
        hi *= 2.0
    return brentq(lambda x: lhs(x) - target, lo, hi, xtol=1e-13, rtol=8.9e-16)


def comparison_radius(inp: RicciBoundInput) -> float:
    """Radius R of the comparison sphere S^d(R) for the given (K, d, diam)."""
    d = inp.dim
    i_sin = sin_power_integral(d)
    if inp.K > 0:
        rk = math.sqrt(inp.K)
        upper = inp.diam * rk / 2.0
        i_cos, _ = quad(
            lambda t: math.cos(t) ** (d - 1), 0.0, upper,
            epsabs=_QUAD_TOL, epsrel=_QUAD_TOL,
        )
        return (1.0 / rk) * (2.0 * i_cos / i_sin) ** (1.0 / d)
    if inp.K == 0:
        return inp.diam / ((1.0 + d * i_sin) ** (1.0 / d) - 1.0)
    rk = math.sqrt(-inp.K)
    return 1.0 / (rk * isoperimetric_constant(inp.diam * rk, d))
