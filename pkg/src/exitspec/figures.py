"""Figure rendering for the report paths.

Every plotting function takes an output path and returns it. matplotlib is
imported lazily with the Agg backend so that headless runs and non-plotting
code paths never touch a display.
"""

from __future__ import annotations

import math

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def radial_profiles(path, radii, profiles: dict, ylabel: str = "value"):
    """Line plot of one or more radial profiles over [0, rho]."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    for label, vals in profiles.items():
        ax.plot(radii, vals, label=label, lw=1.4)
    ax.set_xlabel("geodesic radius r")
    ax.set_ylabel(ylabel)
    if len(profiles) > 1:
        ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def comparison_margins(path, report):
    """Bar chart of per-order margins with their error budgets."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ns = np.asarray(report.ns)
    ax.bar(ns, report.margins, width=0.6, label="margin (ball - domain)")
    ax.errorbar(
        ns, report.margins, yerr=report.budgets,
        fmt="none", ecolor="black", capsize=3, label="budget",
    )
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("moment order n")
    ax.set_ylabel("T_n/Vol margin")
    ax.set_xticks(ns)
    ax.legend(frameon=False)
    ax.set_title(f"{report.domain_descriptor} vs ball ({report.sphere_choice})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def pde_profiles(path, report):
    """Symmetrized solution u* against the radial solution v."""
    plt = _plt()
    fig, (ax, ax2) = plt.subplots(
        2, 1, figsize=(6.5, 5.6), sharex=True,
        gridspec_kw={"height_ratios": [2.2, 1.0]},
    )
    ax.plot(report.radii, report.v, label="v (ball solution)", lw=1.4)
    ax.plot(report.radii, report.u_star, label="u* (symmetrized)", lw=1.4)
    ax.set_ylabel("value")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    ax2.plot(report.radii, report.v - report.u_star, color="tab:green", lw=1.2)
    ax2.axhline(0.0, color="black", lw=0.8)
    ax2.set_xlabel("geodesic radius r")
    ax2.set_ylabel("v - u*")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def bound_convergence(path, ks, bounds, reference: float | None = None):
    """Eigenvalue bounds against the moment order k."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ks = np.asarray(ks)
    finite = np.isfinite(bounds)
    ax.plot(ks[finite], np.asarray(bounds)[finite], "o-", label="bound")
    if reference is not None:
        ax.axhline(reference, color="tab:red", ls="--", lw=1.0, label="eigenvalue")
    ax.set_xlabel("moment order k")
    ax.set_ylabel("upper bound")
    ax.set_xticks(ks)
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def grid_heatmap(path, domain, values, title: str = ""):
    """Heatmap of an interior field over the surface coordinates."""
    plt = _plt()
    surface = domain.surface
    full = np.full(surface.n_nodes, np.nan)
    full[domain.interior_ids] = values
    fig, ax = plt.subplots(figsize=(6.5, 4.6))
    if surface.kind == "flat_torus":
        img = full.reshape(surface.nx, surface.ny).T
        extent = (0.0, surface.Lx, 0.0, surface.Ly)
        xlabel, ylabel = "x", "y"
    else:
        img = full[1:-1].reshape(surface.n_theta - 1, surface.n_phi).T
        extent = (0.0, math.pi, 0.0, 2.0 * math.pi)
        xlabel, ylabel = "theta", "phi"
    im = ax.imshow(
        img, origin="lower", extent=extent, aspect="auto", interpolation="nearest"
    )
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
