"""Distribution functions, decreasing rearrangement, spherical symmetrization.

A nonnegative function sampled with volume weights is rearranged into its
nonincreasing equimeasurable profile, either as a function of enclosed volume
(decreasing_rearrangement) or as a radial profile on a target geodesic ball
(spherical_symmetrization). Discrete samples produce exact step-function
rearrangements: sort by value, accumulate weights, evaluate by nearest level.
No interpolation is performed, so equimeasurability holds exactly at the
discrete level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import InputError
from .model_space import (
    GeodesicBall,
    ModelSpace,
    geodesic_ball_volume,
    sphere_surface_measure,
)


@dataclass(frozen=True)
class WeightedSample:
    """Function values with volume weights on a domain inside an ambient manifold."""

    values: np.ndarray
    weights: np.ndarray
    domain_volume: float
    ambient_volume: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        if v.shape != w.shape or v.ndim != 1 or v.size == 0:
            raise InputError("values and weights must be matching 1-D arrays")
        if np.any(v < 0):
            raise InputError("sample values must be nonnegative")
        if np.any(w <= 0):
            raise InputError("weights must be positive")
        if abs(w.sum() - self.domain_volume) > 1e-10 * self.domain_volume:
            raise InputError("weights must sum to domain_volume")
        if self.domain_volume > self.ambient_volume:
            raise InputError("domain_volume exceeds ambient_volume")


@dataclass(frozen=True)
class RadialField:
    """Values on a strictly increasing radial grid [0, rho] in a model space."""

    space: ModelSpace
    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)
        if r.shape != v.shape or r.ndim != 1 or r.size < 2:
            raise InputError("radii and values must be matching 1-D arrays")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise InputError("radii must increase strictly from 0")
        if not np.all(np.isfinite(v)):
            raise InputError("field values must be finite")

    @property
    def rho(self) -> float:
        return float(self.radii[-1])


def _levels(sample: WeightedSample) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values in decreasing order with cumulative weights per level."""
    order = np.argsort(-sample.values, kind="stable")
    vals = sample.values[order]
    wts = sample.weights[order]
    # merge ties into single levels
    keep = np.ones(len(vals), dtype=bool)
    keep[1:] = vals[1:] != vals[:-1]
    lev = vals[keep]
    cum = np.cumsum(wts)[np.append(np.nonzero(keep)[0][1:] - 1, len(vals) - 1)]
    return lev, cum


def distribution_function(sample: WeightedSample, t: float) -> float:
    """Volume of the superlevel set {f > t}."""
    return float(sample.weights[sample.values > t].sum())


def decreasing_rearrangement(sample: WeightedSample, s) -> float | np.ndarray:
    """f#(s) = inf{t : Vol{f > t} <= s}, the nonincreasing rearrangement.

    s may be a scalar or array in [0, domain_volume]; f#(0) is the maximum
    value and f#(domain_volume) the minimum.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < -1e-12) or np.any(s_arr > sample.domain_volume * (1 + 1e-12)):
        raise InputError("rearrangement argument outside [0, domain_volume]")
    lev, cum = _levels(sample)
    idx = np.searchsorted(cum, s_arr, side="right")
    idx = np.minimum(idx, len(lev) - 1)
    out = lev[idx]
    return float(out) if np.isscalar(s) else out


def _normalized_volume_arg(
    sample: WeightedSample, target: GeodesicBall, n_radii: int
) -> tuple[np.ndarray, np.ndarray]:
    """Radial grid on the target ball and the rearrangement argument along it."""
    if target.space.kind != "spherical":
        raise InputError("symmetrization target must be a ball in a spherical space")
    if n_radii < 2:
        raise InputError("n_radii must be >= 2")
    total = target.space.total_volume
    frac_target = target.volume / total
    frac_domain = sample.domain_volume / sample.ambient_volume
    if abs(frac_target - frac_domain) > 1e-8 * frac_domain:
        raise InputError(
            "volume normalization violated: Vol(target)/Vol(sphere) = "
            f"{frac_target} but Vol(domain)/Vol(ambient) = {frac_domain}"
        )
    r = np.linspace(0.0, target.radius, n_radii)
    space = target.space
    if space.dim == 2:
        a = space.curvature_scale
        ball_vol = 2.0 * math.pi * a**2 * (1.0 - np.cos(r / a))
    else:
        ball_vol = np.array([geodesic_ball_volume(space, ri) for ri in r])
    s_arg = (sample.ambient_volume / total) * ball_vol
    s_arg = np.clip(s_arg, 0.0, sample.domain_volume)
    return r, s_arg


def spherical_symmetrization(
    sample: WeightedSample, target: GeodesicBall, n_radii: int = 4096
) -> RadialField:
    """Radial nonincreasing profile on the target ball equimeasurable with f.

    f*(r) = f#((Vol(ambient)/Vol(sphere)) * Vol(B(r))). The target must satisfy
    the volume normalization Vol(target)/Vol(sphere) = Vol(domain)/Vol(ambient)
    to 1e-8 relative; build it with comparison.symmetrized_ball.
    """
    r, s_arg = _normalized_volume_arg(sample, target, n_radii)
    prof = decreasing_rearrangement(sample, s_arg)
    return RadialField(target.space, r, prof)


def quantization_gap(
    sample: WeightedSample, target: GeodesicBall, n_radii: int = 4096
) -> float:
    """Largest gap between adjacent discrete levels selected along the profile.

    Bounds the nearest-level evaluation error of spherical_symmetrization and
    enters the pointwise comparison budgets.
    """
    _, s_arg = _normalized_volume_arg(sample, target, n_radii)
    lev, cum = _levels(sample)
    idx = np.searchsorted(cum, s_arg, side="right")
    idx = np.minimum(idx, len(lev) - 1)
    gaps = np.where(idx > 0, lev[np.maximum(idx - 1, 0)] - lev[idx], 0.0)
    return float(gaps.max())


def lp_mean(obj: WeightedSample | RadialField, p: float) -> float:
    """Volume-averaged p-th power mean (1/Vol) int f^p dV.

    Weighted sum for samples; metric-weighted Simpson quadrature for radial
    fields.
    """
    if p < 1:
        raise InputError(f"p must be >= 1, got {p}")
    if isinstance(obj, WeightedSample):
        return float(np.dot(obj.weights, obj.values**p) / obj.domain_volume)
    space = obj.space
    a = space.curvature_scale
    d = space.dim
    if space.kind == "spherical":
        s = a * np.sin(obj.radii / a)
    elif space.kind == "hyperbolic":
        s = a * np.sinh(obj.radii / a)
    else:
        s = obj.radii
    beta = sphere_surface_measure(d)
    integrand = beta * s ** (d - 1) * obj.values**p
    vol = geodesic_ball_volume(space, obj.rho)
    return float(simpson(integrand, x=obj.radii) / vol)
