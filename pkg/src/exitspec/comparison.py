"""Inequality harnesses: moment comparison, pointwise comparison, Cheeger, eigenvalue ordering.

Each checker assembles the geometry, grid, radial, rearrangement, and spectral
modules to evaluate both sides of one inequality and an error budget computed
from the data itself (resolution-doubling differences, rearrangement level
quantization, radial quadrature doubling). A check passes when the inequality
holds up to its budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .grid_solver import (
    FlatTorus,
    GridDomain,
    GridField,
    dirichlet_eigenpairs,
    moment_hierarchy_grid,
    poisson_solve,
    weighted_sample,
)
from .iso_radius import RicciBoundInput, comparison_radius
from .model_space import GeodesicBall, ModelSpace, cap_radius_for_volume
from .radial_solver import MomentSequence, moment_hierarchy_ball, radial_poisson_solve
from .rearrange import quantization_gap, spherical_symmetrization
from .spectral import recover_spectrum

SPHERE_CHOICES = ("iso_radius", "sqrt_k")

_RADIAL_N = 4096


def comparison_sphere(domain: GridDomain, sphere_choice: str) -> ModelSpace:
    """The round sphere a domain is compared against.

    'iso_radius' computes the radius from the surface's curvature bound,
    dimension, and diameter; 'sqrt_k' uses the curvature sphere 1/sqrt(K)
    and requires K > 0.
    """
    if sphere_choice not in SPHERE_CHOICES:
        raise InputError(f"sphere_choice must be one of {SPHERE_CHOICES}")
    K = domain.surface.curvature_bound
    if sphere_choice == "sqrt_k":
        if not K > 0:
            raise InputError("sqrt_k comparison requires positive curvature")
        R = 1.0 / math.sqrt(K)
    else:
        R = comparison_radius(
            RicciBoundInput(K=K, dim=2, diam=domain.surface.diameter)
        )
    return ModelSpace(kind="spherical", dim=2, curvature_scale=R)


def symmetrized_ball(
    vol_domain: float, vol_ambient: float, sphere: ModelSpace
) -> GeodesicBall:
    """Ball on the comparison sphere with the volume-normalized share.

    Vol(ball)/Vol(sphere) = vol_domain/vol_ambient.
    """
    if sphere.kind != "spherical":
        raise InputError("symmetrization target space must be spherical")
    if not 0 < vol_domain < vol_ambient:
        raise InputError("need 0 < vol_domain < vol_ambient")
    target = sphere.total_volume * vol_domain / vol_ambient
    rho = cap_radius_for_volume(sphere, target)
    return GeodesicBall(sphere, rho)


@dataclass(frozen=True)
class ComparisonReport:
    """Per-order moment ratios of a domain vs its symmetrized ball."""

    domain_descriptor: str
    sphere_choice: str
    sphere_radius: float
    ns: np.ndarray
    ratios_domain: np.ndarray
    ratios_ball: np.ndarray
    margins: np.ndarray
    budgets: np.ndarray
    passed: np.ndarray

    def __post_init__(self):
        lengths = {
            len(self.ns), len(self.ratios_domain), len(self.ratios_ball),
            len(self.margins), len(self.budgets), len(self.passed),
        }
        if len(lengths) != 1:
            raise InputError("report arrays must have equal length")

    @property
    def all_passed(self) -> bool:
        return bool(np.all(self.passed))

    def to_dict(self) -> dict:
        return {
            "domain": self.domain_descriptor,
            "sphere_choice": self.sphere_choice,
            "sphere_radius": self.sphere_radius,
            "orders": [int(n) for n in self.ns],
            "ratios_domain": [float(x) for x in self.ratios_domain],
            "ratios_ball": [float(x) for x in self.ratios_ball],
            "margins": [float(x) for x in self.margins],
            "budgets": [float(x) for x in self.budgets],
            "passed": [bool(x) for x in self.passed],
            "all_passed": self.all_passed,
        }


def _ball_ratios(
    vol_domain: float, vol_ambient: float, sphere: ModelSpace, N: int, n_radii: int
) -> np.ndarray:
    ball = symmetrized_ball(vol_domain, vol_ambient, sphere)
    mom, _ = moment_hierarchy_ball(ball, N, n_radii)
    return mom.moments / mom.volume


def moment_comparison_report(
    domain: GridDomain,
    N: int,
    sphere_choice: str = "iso_radius",
    descriptor: str = "domain",
) -> ComparisonReport:
    """Check T_n(domain)/Vol(domain) <= T_n(ball)/Vol(ball) for n = 1..N.

    The per-order budget is the resolution-doubling difference of the margin
    (grid at half resolution, ball re-normalized to the coarse volume) plus
    the radial quadrature doubling allowance.
    """
    sphere = comparison_sphere(domain, sphere_choice)
    vol_ambient = domain.surface.total_volume
    mom_f, _ = moment_hierarchy_grid(domain, N)
    ratios_dom_f = mom_f.moments / mom_f.volume
    ratios_ball_f = _ball_ratios(mom_f.volume, vol_ambient, sphere, N, _RADIAL_N)
    margins_f = ratios_ball_f - ratios_dom_f

    coarse = domain.coarsened()
    mom_c, _ = moment_hierarchy_grid(coarse, N)
    ratios_dom_c = mom_c.moments / mom_c.volume
    ratios_ball_c = _ball_ratios(mom_c.volume, vol_ambient, sphere, N, _RADIAL_N)
    margins_c = ratios_ball_c - ratios_dom_c

    radial_allow = np.abs(
        ratios_ball_f
        - _ball_ratios(mom_f.volume, vol_ambient, sphere, N, _RADIAL_N // 2)
    )
    budgets = np.abs(margins_f - margins_c) + radial_allow
    passed = margins_f >= -budgets
    return ComparisonReport(
        domain_descriptor=descriptor,
        sphere_choice=sphere_choice,
        sphere_radius=sphere.curvature_scale,
        ns=np.arange(1, N + 1),
        ratios_domain=ratios_dom_f,
        ratios_ball=ratios_ball_f,
        margins=margins_f,
        budgets=budgets,
        passed=passed,
    )


@dataclass(frozen=True)
class PdeComparisonReport:
    """Pointwise check u* <= v on the symmetrized ball.

    max_violation = max(u* - v) over the radial grid; the budget is the
    grid-doubling difference of u* plus the rearrangement level-quantization
    gap plus the radial-solution doubling allowance.
    """

    max_violation: float
    budget: float
    doubling_term: float
    quantization_term: float
    radial_term: float
    radii: np.ndarray = field(repr=False)
    u_star: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.budget

    def to_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "budget": self.budget,
            "doubling_term": self.doubling_term,
            "quantization_term": self.quantization_term,
            "radial_term": self.radial_term,
            "passed": self.passed,
        }


def _symmetrized_solution(
    domain: GridDomain, f: GridField, sphere: ModelSpace, n_radii: int
) -> tuple[np.ndarray, np.ndarray, GeodesicBall, float]:
    u = poisson_solve(domain, f)
    sample = weighted_sample(domain, u)
    ball = symmetrized_ball(domain.volume, domain.surface.total_volume, sphere)
    prof = spherical_symmetrization(sample, ball, n_radii)
    gap = quantization_gap(sample, ball, n_radii)
    return prof.radii, prof.values, ball, gap


def pde_comparison_check(
    domain: GridDomain,
    f: GridField,
    sphere_choice: str = "iso_radius",
    n_radii: int = _RADIAL_N,
) -> PdeComparisonReport:
    """Compare the symmetrized Poisson solution u* with the radial solution v.

    u solves the Dirichlet problem on the domain with right side f >= 0; v
    solves it on the symmetrized ball with right side f*; the check asserts
    the domination u* <= v pointwise, up to the recorded budget.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise InputError("f must be nonnegative")
    sphere = comparison_sphere(domain, sphere_choice)
    r, u_star, ball, gap = _symmetrized_solution(domain, f, sphere, n_radii)

    f_star = spherical_symmetrization(
        weighted_sample(domain, f), ball, n_radii
    )
    v = radial_poisson_solve(ball, f_star).values
    max_violation = float(np.max(u_star - v))

    # resolution-doubling term for the grid side
    coarse = domain.coarsened()
    f_c = _restrict_field(domain, coarse, f)
    r_c, u_star_c, _, _ = _symmetrized_solution(coarse, f_c, sphere, n_radii)
    idx = np.minimum(np.searchsorted(r_c, r), len(r_c) - 1)
    doubling = float(np.max(np.abs(u_star - u_star_c[idx])))

    # radial quadrature doubling term
    n_half = n_radii // 2
    f_star_h = spherical_symmetrization(
        weighted_sample(domain, f), ball, n_half
    )
    v_h = radial_poisson_solve(ball, f_star_h).values
    radial_term = float(
        np.max(np.abs(v - np.interp(r, f_star_h.radii, v_h)))
    )
    budget = doubling + gap + radial_term
    return PdeComparisonReport(
        max_violation=max_violation,
        budget=budget,
        doubling_term=doubling,
        quantization_term=gap,
        radial_term=radial_term,
        radii=r,
        u_star=u_star,
        v=v,
    )


def _restrict_field(
    fine: GridDomain, coarse: GridDomain, f: GridField
) -> GridField:
    """Transfer a right side to the half-resolution grid.

    Constants restrict exactly; otherwise the grids must be nested (every
    coarse node sits on a fine node) and values are copied across.
    """
    if np.ptp(f) == 0:
        return np.full(coarse.n_interior, f[0])
    fs, cs = fine.surface, coarse.surface
    if isinstance(fs, FlatTorus):
        sx, sy = fs.nx // cs.nx, fs.ny // cs.ny
        if cs.nx * sx != fs.nx or cs.ny * sy != fs.ny:
            raise InputError("grids are not nested; cannot restrict the right side")
        ci, cj = np.divmod(coarse.interior_ids, cs.ny)
        fine_nodes = (ci * sx) * fs.ny + cj * sy
    else:
        st, sp_ = fs.n_theta // cs.n_theta, fs.n_phi // cs.n_phi
        if cs.n_theta * st != fs.n_theta or cs.n_phi * sp_ != fs.n_phi:
            raise InputError("grids are not nested; cannot restrict the right side")
        fine_nodes = np.empty(len(coarse.interior_ids), dtype=np.int64)
        for k, node in enumerate(coarse.interior_ids):
            if node == 0:
                fine_nodes[k] = 0
            elif node == cs.n_nodes - 1:
                fine_nodes[k] = fs.n_nodes - 1
            else:
                row, col = divmod(node - 1, cs.n_phi)
                fine_nodes[k] = 1 + (((row + 1) * st) - 1) * fs.n_phi + col * sp_
    full = np.zeros(fs.n_nodes)
    full[fine.interior_ids] = f
    if not fine.interior_mask[fine_nodes].all():
        raise InputError("coarse interior is not contained in the fine interior")
    return full[fine_nodes]


@dataclass(frozen=True)
class CheegerReport:
    """C^2 <= Vol * (k!)^2/(2k-1)! * T_{2k-1} / T_k^2, with recorded slack."""

    C: float
    k: int
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs

    def to_dict(self) -> dict:
        return {
            "C": self.C, "k": self.k, "lhs": self.lhs, "rhs": self.rhs,
            "slack": self.slack, "passed": self.passed,
        }


def cheeger_bound_check(
    C: float,
    vol_domain: float,
    moments: MomentSequence,
    k: int,
    vol_ambient: float | None = None,
) -> CheegerReport:
    """Isoperimetric-constant bound from moment ratios.

    The hypothesis Vol(domain) <= Vol(ambient)/2 is enforced when the ambient
    volume is supplied; C is an input with documented model values (circle
    4/L, round sphere 1/R, square torus 4/L), not computed here.
    """
    if not C > 0:
        raise InputError("C must be positive")
    if k < 1 or 2 * k - 1 > moments.n_max:
        raise InputError(f"k={k} needs T_{2 * k - 1}, have {moments.n_max} moments")
    if vol_ambient is not None and vol_domain > vol_ambient / 2 * (1 + 1e-12):
        raise InputError("hypothesis Vol(domain) <= Vol(ambient)/2 violated")
    t_odd = moments.moments[2 * k - 2]
    t_k = moments.moments[k - 1]
    factor = math.factorial(k) ** 2 / math.factorial(2 * k - 1)
    rhs = vol_domain * factor * t_odd / t_k**2
    return CheegerReport(C=C, k=k, lhs=C * C, rhs=rhs)


@dataclass(frozen=True)
class FaberKrahnReport:
    """lambda_1(ball) <= lambda_1(domain) with a computed budget."""

    lambda_domain: float
    lambda_ball: float
    budget: float

    @property
    def slack(self) -> float:
        return self.lambda_domain - self.lambda_ball

    @property
    def passed(self) -> bool:
        return self.lambda_ball <= self.lambda_domain + self.budget

    def to_dict(self) -> dict:
        return {
            "lambda_domain": self.lambda_domain,
            "lambda_ball": self.lambda_ball,
            "budget": self.budget,
            "slack": self.slack,
            "passed": self.passed,
        }


def faber_krahn_check(
    domain: GridDomain,
    sphere_choice: str = "iso_radius",
    n_moments: int = 16,
) -> FaberKrahnReport:
    """Lowest-eigenvalue ordering between a domain and its symmetrized ball.

    lambda_1(domain) comes from the grid eigensolver; lambda_1(ball) from the
    extrapolated moment-ratio limit applied to the ball's radial moments. The
    budget is the grid doubling difference plus the extrapolation's own error
    estimate.
    """
    sphere = comparison_sphere(domain, sphere_choice)
    lam_f = float(dirichlet_eigenpairs(domain, 1).eigenvalues[0])
    lam_c = float(dirichlet_eigenpairs(domain.coarsened(), 1).eigenvalues[0])
    ball = symmetrized_ball(domain.volume, domain.surface.total_volume, sphere)
    mom, _ = moment_hierarchy_ball(ball, n_moments, _RADIAL_N)
    rec = recover_spectrum(mom, max_pairs=1)
    if len(rec.spectrum.pairs) == 0:
        raise InputError(f"ball eigenvalue recovery stopped: {rec.stop_reason}")
    nu1 = float(rec.spectrum.nus[0])
    nu_err = float(rec.pair_errors[0, 0])
    budget = abs(lam_f - lam_c) + nu_err
    return FaberKrahnReport(lambda_domain=lam_f, lambda_ball=nu1, budget=budget)
