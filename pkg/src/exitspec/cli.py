"""Command-line front end.

Subcommands build model balls or grid domains, run the solvers, and emit
JSON/CSV reports plus rendered figures. All output is deterministic for a
given configuration: no timestamps, sorted JSON keys, round-trip float
formatting.

Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence,
4 comparison-check failure beyond its error budget.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import figures
from .comparison import (
    faber_krahn_check,
    moment_comparison_report,
    pde_comparison_check,
    symmetrized_ball,
)
from .errors import ComparisonFailure, ConvergenceError, InputError
from .grid_solver import (
    CapMask,
    FlatTorus,
    RectMask,
    RoundSphere,
    build_domain,
    moment_hierarchy_grid,
    poisson_solve,
)
from .iso_radius import RicciBoundInput, comparison_radius
from .model_space import GeodesicBall, ModelSpace
from .radial_solver import MomentSequence, moment_hierarchy_ball, radial_grid
from .rearrange import WeightedSample, spherical_symmetrization
from .spectral import SpectralData, eigenvalue_bound, recover_spectrum

PRESET_NAMES = (
    "torus-square-vs-cap",
    "sphere-rect-vs-cap",
    "sphere-cap-equality",
    "interval-bounds",
)

_CONFIG_KEYS = {
    "preset": str,
    "n_moments": int,
    "resolution": int,
    "sphere_choice": str,
    "n_radii": int,
    "output_dir": str,
    "figures": bool,
    "format": str,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def _fmt_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header, rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(getattr(args, "output", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _wants(args, kind: str) -> bool:
    fmt = getattr(args, "format", "both") or "both"
    return fmt in (kind, "both")


# ---------------------------------------------------------------------------
# ball-moments


def _model_space_from_args(args) -> ModelSpace:
    if args.space == "euclidean":
        return ModelSpace("euclidean", args.dim)
    if args.R is not None and args.K is not None:
        raise InputError("give either -R or -K, not both")
    if args.K is not None:
        if args.space == "sphere":
            if args.K <= 0.0:
                raise InputError("sphere needs K > 0")
            scale = 1.0 / math.sqrt(args.K)
        else:
            if args.K >= 0.0:
                raise InputError("hyperbolic space needs K < 0")
            scale = 1.0 / math.sqrt(-args.K)
    else:
        scale = args.R if args.R is not None else 1.0
    kind = "spherical" if args.space == "sphere" else "hyperbolic"
    return ModelSpace(kind, args.dim, scale)


def cmd_ball_moments(args) -> int:
    space = _model_space_from_args(args)
    ball = GeodesicBall(space, args.rho)
    moments, fields = moment_hierarchy_ball(ball, args.N, n_radii=args.n_radii)
    out = _out_dir(args)
    written = []
    if _wants(args, "json"):
        written.append(_write_json(out / "ball_moments.json", moments.to_dict()))
    if _wants(args, "csv"):
        radii = radial_grid(ball, args.n_radii)
        header = ["r"] + [f"u{n}" for n in range(1, args.N + 1)]
        rows = np.column_stack([radii] + [f.values for f in fields])
        written.append(_write_csv(out / "ball_profiles.csv", header, rows))
    if args.figures:
        radii = radial_grid(ball, args.n_radii)
        profs = {f"u{n}": fields[n - 1].values for n in range(1, min(args.N, 4) + 1)}
        written.append(
            figures.radial_profiles(out / "ball_profiles.png", radii, profs)
        )
    print(f"volume = {float(moments.volume)!r}")
    for n in range(1, args.N + 1):
        print(f"T_{n} = {float(moments.moments[n - 1])!r}")
    for p in written:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# grid-moments


def _parse_mask(spec: str, surface):
    kind, _, rest = spec.partition(":")
    try:
        if kind == "rect":
            vals = tuple(float(v) for v in rest.split(","))
            if len(vals) != 4:
                raise ValueError("rect mask needs four numbers")
            return RectMask(vals)
        if kind == "cap":
            parts = rest.split(",")
            if parts[0] in ("north", "south"):
                if len(parts) != 2:
                    raise ValueError("cap mask needs a pole and a radius")
                return CapMask(parts[0], float(parts[1]))
            if len(parts) != 3:
                raise ValueError("cap mask needs a center and a radius")
            return CapMask((float(parts[0]), float(parts[1])), float(parts[2]))
    except ValueError as exc:
        raise InputError(f"bad mask spec {spec!r}: {exc}") from exc
    raise InputError(f"unknown mask kind {kind!r}; use rect: or cap:")


def _surface_from_args(args):
    if args.surface == "torus":
        return FlatTorus(args.Lx, args.Ly, args.nx, args.ny)
    return RoundSphere(args.R, args.n_theta, args.n_phi)


def cmd_grid_moments(args) -> int:
    surface = _surface_from_args(args)
    if (args.mask is None) == (args.mask_file is None):
        raise InputError("give exactly one of --mask or --mask-file")
    if args.mask_file is not None:
        mask = args.mask_file
    else:
        mask = _parse_mask(args.mask, surface)
    domain = build_domain(surface, mask)
    moments, fields = moment_hierarchy_grid(domain, args.N)
    out = _out_dir(args)
    written = []
    if _wants(args, "json"):
        written.append(_write_json(out / "grid_moments.json", moments.to_dict()))
    if _wants(args, "csv"):
        c1_all, c2_all = domain.surface.coords()
        c1 = c1_all[domain.interior_ids]
        c2 = c2_all[domain.interior_ids]
        for n in range(1, args.N + 1):
            rows = np.column_stack([domain.interior_ids, c1, c2, fields[n - 1]])
            header = ["node", "c1", "c2", f"u{n}"]
            written.append(_write_csv(out / f"field_u{n}.csv", header, rows))
    if args.figures:
        written.append(
            figures.grid_heatmap(
                out / "grid_u1.png", domain, fields[0], title="first moment field"
            )
        )
    print(f"volume = {float(domain.volume)!r}")
    print(f"interior nodes = {domain.n_interior}")
    for n in range(1, args.N + 1):
        print(f"T_{n} = {float(moments.moments[n - 1])!r}")
    for p in written:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# eig-bounds


def cmd_eig_bounds(args) -> int:
    moments = MomentSequence.from_dict(_load_json(args.moments))
    known = None
    if args.spectrum is not None:
        known = SpectralData.from_dict(_load_json(args.spectrum))
    if args.k_min < 1 or args.k_max < args.k_min:
        raise InputError("need 1 <= k-min <= k-max")
    reports = [
        eigenvalue_bound(moments, known, n=args.n, k=k)
        for k in range(args.k_min, args.k_max + 1)
    ]
    payload = {"n": args.n, "bounds": [r.to_dict() for r in reports]}
    recovery = None
    if args.recover:
        recovery = recover_spectrum(moments, max_pairs=args.n + 1)
        payload["recovery"] = {
            "spectrum": recovery.spectrum.to_dict(),
            "pair_errors": list(recovery.pair_errors),
            "stop_reason": recovery.stop_reason,
        }
    out = _out_dir(args)
    written = []
    if _wants(args, "json"):
        written.append(_write_json(out / "eig_bounds.json", payload))
    if _wants(args, "csv"):
        rows = [(r.k, r.bound, r.vacuous) for r in reports]
        written.append(
            _write_csv(out / "eig_bounds.csv", ["k", "bound", "vacuous"], rows)
        )
    if args.figures:
        ks = [r.k for r in reports]
        vals = [r.bound for r in reports]
        ref = None
        if recovery is not None and recovery.spectrum.pairs.shape[0] >= args.n:
            ref = float(recovery.spectrum.nus[args.n - 1])
        written.append(figures.bound_convergence(out / "eig_bounds.png", ks, vals, ref))
    for r in reports:
        tag = " (vacuous)" if r.vacuous else ""
        print(f"k={r.k}: bound = {float(r.bound)!r}{tag}")
    for p in written:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# iso-radius


def cmd_iso_radius(args) -> int:
    inp = RicciBoundInput(K=args.K, dim=args.dim, diam=args.diam)
    radius = comparison_radius(inp)
    print(repr(radius))
    if args.output is not None:
        out = _out_dir(args)
        _write_json(
            out / "iso_radius.json",
            {"K": args.K, "dim": args.dim, "diam": args.diam, "radius": radius},
        )
        print(f"wrote {out / 'iso_radius.json'}")
    return 0


# ---------------------------------------------------------------------------
# compare presets


def _check(name: str, passed: bool, **details) -> dict:
    entry = {"name": name, "passed": bool(passed)}
    entry.update(details)
    return entry


def _preset_torus_square_vs_cap(n_moments, resolution, sphere_choice, n_radii, out, figs):
    choice = sphere_choice or "iso_radius"
    surface = FlatTorus(1.0, 1.0, resolution, resolution)
    domain = build_domain(surface, RectMask((0.0, 0.5, 0.0, 0.5)))
    mom = moment_comparison_report(domain, n_moments, choice, "torus square")
    f = np.ones(domain.n_interior)
    pde = pde_comparison_check(domain, f, choice, n_radii=n_radii)
    checks = [
        _check("moment_ratios", mom.all_passed, report=mom.to_dict()),
        _check("pde_domination", pde.passed, report=pde.to_dict()),
    ]
    if figs:
        figures.comparison_margins(out / "margins.png", mom)
        figures.pde_profiles(out / "pde_profiles.png", pde)
    return checks


def _preset_sphere_rect_vs_cap(n_moments, resolution, sphere_choice, n_radii, out, figs):
    choice = sphere_choice or "sqrt_k"
    surface = RoundSphere(1.0, resolution, 2 * resolution)
    bounds = (math.pi / 3.0, 2.0 * math.pi / 3.0, 0.0, math.pi / 2.0)
    domain = build_domain(surface, RectMask(bounds))
    mom = moment_comparison_report(domain, n_moments, choice, "sphere rectangle")
    f = np.ones(domain.n_interior)
    pde = pde_comparison_check(domain, f, choice, n_radii=n_radii)
    checks = [
        _check("moment_ratios", mom.all_passed, report=mom.to_dict()),
        _check("pde_domination", pde.passed, report=pde.to_dict()),
    ]
    if figs:
        figures.comparison_margins(out / "margins.png", mom)
        figures.pde_profiles(out / "pde_profiles.png", pde)
    return checks


def _preset_sphere_cap_equality(n_moments, resolution, sphere_choice, n_radii, out, figs):
    choice = sphere_choice or "sqrt_k"
    n_theta = max(48, 48 * round(resolution / 48))
    surface = RoundSphere(1.0, n_theta, 2 * n_theta)
    domain = build_domain(surface, CapMask("north", math.pi / 3.0))
    mom = moment_comparison_report(domain, n_moments, choice, "sphere cap")
    margins = np.asarray(mom.margins)
    budgets = np.asarray(mom.budgets)
    mom_equal = bool(np.all(np.abs(margins) <= budgets))
    f = np.ones(domain.n_interior)
    pde = pde_comparison_check(domain, f, choice, n_radii=n_radii)
    max_abs = float(np.max(np.abs(pde.u_star - pde.v)))
    pde_equal = max_abs <= pde.budget
    checks = [
        _check(
            "moment_equality",
            mom_equal,
            report=mom.to_dict(),
            max_abs_margin=float(np.max(np.abs(margins))),
        ),
        _check(
            "pde_equality",
            pde_equal,
            report=pde.to_dict(),
            max_abs_difference=max_abs,
        ),
    ]
    if figs:
        figures.comparison_margins(out / "margins.png", mom)
        figures.pde_profiles(out / "pde_profiles.png", pde)
    return checks


def _preset_interval_bounds(n_moments, resolution, sphere_choice, n_radii, out, figs):
    k_max = 6
    ball = GeodesicBall(ModelSpace("euclidean", 1), 0.5)
    moments, _ = moment_hierarchy_ball(ball, 2 * k_max, n_radii=n_radii)
    reports = [eigenvalue_bound(moments, None, n=1, k=k) for k in range(1, k_max + 1)]
    bounds = np.array([r.bound for r in reports])
    recovery = recover_spectrum(moments, max_pairs=2)
    nu1 = float(recovery.spectrum.nus[0])
    monotone = bool(np.all(np.diff(bounds) <= 1e-12 * bounds[:-1]))
    valid = bool(np.all(bounds >= nu1 * (1.0 - 1e-9)))
    final_gap = abs(bounds[-1] - nu1) / nu1
    checks = [
        _check("bounds_monotone", monotone, bounds=bounds.tolist()),
        _check("bounds_above_first_eigenvalue", valid, nu1_recovered=nu1),
        _check("final_bound_tight", final_gap <= 1e-6, final_relative_gap=float(final_gap)),
    ]
    if figs:
        figures.bound_convergence(out / "bounds.png", list(range(1, k_max + 1)), bounds, nu1)
    return checks


_PRESET_FUNCS = {
    "torus-square-vs-cap": _preset_torus_square_vs_cap,
    "sphere-rect-vs-cap": _preset_sphere_rect_vs_cap,
    "sphere-cap-equality": _preset_sphere_cap_equality,
    "interval-bounds": _preset_interval_bounds,
}


def _read_run_config(path) -> dict:
    raw = _load_json(path)
    if not isinstance(raw, dict):
        raise InputError("config file must hold a JSON object")
    for key, val in raw.items():
        if key not in _CONFIG_KEYS:
            raise InputError(f"unknown config key {key!r}")
        want = _CONFIG_KEYS[key]
        if want is int and isinstance(val, bool):
            raise InputError(f"config key {key!r} must be {want.__name__}")
        if not isinstance(val, want):
            raise InputError(f"config key {key!r} must be {want.__name__}")
    return raw


def run_preset(preset, n_moments=5, resolution=256, sphere_choice=None,
               n_radii=4096, out_dir=".", render_figures=True):
    """Run one named comparison preset; returns the report dict."""
    if preset not in _PRESET_FUNCS:
        raise InputError(f"unknown preset {preset!r}; choose from {PRESET_NAMES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    checks = _PRESET_FUNCS[preset](
        n_moments, resolution, sphere_choice, n_radii, out, render_figures
    )
    return {
        "preset": preset,
        "n_moments": n_moments,
        "resolution": resolution,
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }


def cmd_compare(args) -> int:
    config = {}
    if args.config is not None:
        config = _read_run_config(args.config)
    preset = args.preset or config.get("preset")
    if preset is None:
        raise InputError("no preset given (use --preset or a config file)")
    n_moments = args.N if args.N is not None else config.get("n_moments", 5)
    resolution = (
        args.resolution if args.resolution is not None
        else config.get("resolution", 256)
    )
    sphere_choice = args.sphere_choice or config.get("sphere_choice")
    n_radii = args.n_radii if args.n_radii is not None else config.get("n_radii", 4096)
    out_dir = args.output or config.get("output_dir", ".")
    render = args.figures and config.get("figures", True)
    report = run_preset(
        preset, n_moments=n_moments, resolution=resolution,
        sphere_choice=sphere_choice, n_radii=n_radii,
        out_dir=out_dir, render_figures=render,
    )
    out = Path(out_dir)
    if _wants(args, "json"):
        _write_json(out / "compare_report.json", report)
        print(f"wrote {out / 'compare_report.json'}")
    if _wants(args, "csv"):
        rows = [(c["name"], c["passed"]) for c in report["checks"]]
        _write_csv(out / "compare_checks.csv", ["check", "passed"], rows)
        print(f"wrote {out / 'compare_checks.csv'}")
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {preset}:{c['name']}")
    if not report["all_passed"]:
        failing = [c["name"] for c in report["checks"] if not c["passed"]]
        raise ComparisonFailure(f"checks failed: {', '.join(failing)}")
    print("all checks passed")
    return 0


# ---------------------------------------------------------------------------
# symmetrize


def _read_sample_csv(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        lines = Path(path).read_text().strip().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    values, weights = [], []
    for i, line in enumerate(lines):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) < 2:
            raise InputError(f"{path}:{i + 1}: need value,weight")
        try:
            v, w = float(parts[0]), float(parts[1])
        except ValueError:
            if i == 0:
                continue
            raise InputError(f"{path}:{i + 1}: non-numeric row") from None
        values.append(v)
        weights.append(w)
    if not values:
        raise InputError(f"{path}: no data rows")
    return np.array(values), np.array(weights)


def cmd_symmetrize(args) -> int:
    values, weights = _read_sample_csv(args.input)
    dvol = float(np.sum(weights))
    avol = args.ambient_volume
    if not avol > dvol:
        raise InputError(
            f"--ambient-volume must exceed the total sample weight {dvol!r}"
        )
    sample = WeightedSample(values, weights, dvol, avol)
    sphere = ModelSpace("spherical", args.dim, args.R)
    ball = symmetrized_ball(dvol, avol, sphere)
    field = spherical_symmetrization(sample, ball, n_radii=args.n_radii)
    out = _out_dir(args)
    written = [
        _write_csv(
            out / "symmetrized.csv",
            ["r", "f_star"],
            np.column_stack([field.radii, field.values]),
        )
    ]
    if args.figures:
        written.append(
            figures.radial_profiles(
                out / "symmetrized.png", field.radii, {"f*": field.values}
            )
        )
    print(f"ball radius = {float(field.rho)!r}")
    for p in written:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common_output(p, figures_default=True):
    p.add_argument("-o", "--output", default=None, help="output directory")
    p.add_argument(
        "--format", choices=("json", "csv", "both"), default="both",
        help="which report files to write",
    )
    p.add_argument(
        "--no-figures", dest="figures", action="store_false",
        default=figures_default, help="skip figure rendering",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exitspec",
        description="Exit-time moment spectra and comparison checks on model surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ball-moments", help="moment hierarchy on a geodesic ball")
    p.add_argument("--space", choices=("euclidean", "sphere", "hyperbolic"), required=True)
    p.add_argument("-d", "--dim", type=int, required=True)
    p.add_argument("-R", type=float, default=None, help="curvature scale")
    p.add_argument("-K", type=float, default=None, help="sectional curvature")
    p.add_argument("--rho", type=float, required=True, help="ball radius")
    p.add_argument("-N", type=int, required=True, help="highest moment order")
    p.add_argument("--n-radii", type=int, default=4096)
    _add_common_output(p)
    p.set_defaults(func=cmd_ball_moments)

    p = sub.add_parser("grid-moments", help="moment hierarchy on a grid domain")
    p.add_argument("--surface", choices=("torus", "sphere"), required=True)
    p.add_argument("--Lx", type=float, default=1.0)
    p.add_argument("--Ly", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=256)
    p.add_argument("--ny", type=int, default=256)
    p.add_argument("-R", type=float, default=1.0)
    p.add_argument("--n-theta", type=int, default=256)
    p.add_argument("--n-phi", type=int, default=512)
    p.add_argument("--mask", default=None, help="rect:x0,x1,y0,y1 or cap:center,rho")
    p.add_argument("--mask-file", default=None, help="plain-text 0/1 mask file")
    p.add_argument("-N", type=int, default=4)
    _add_common_output(p)
    p.set_defaults(func=cmd_grid_moments)

    p = sub.add_parser("eig-bounds", help="eigenvalue upper bounds from moments")
    p.add_argument("--moments", required=True, help="MomentSequence JSON file")
    p.add_argument("--spectrum", default=None, help="known lower spectrum JSON file")
    p.add_argument("-n", type=int, default=1, help="eigenvalue index")
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--recover", action="store_true", help="also recover pairs")
    _add_common_output(p)
    p.set_defaults(func=cmd_eig_bounds)

    p = sub.add_parser("iso-radius", help="comparison ball radius from (K, d, diam)")
    p.add_argument("-K", type=float, required=True)
    p.add_argument("-d", "--dim", type=int, required=True)
    p.add_argument("--diam", type=float, required=True)
    p.add_argument("-o", "--output", default=None, help="optional output directory")
    p.set_defaults(func=cmd_iso_radius)

    p = sub.add_parser("compare", help="run a named comparison preset")
    p.add_argument("--preset", choices=PRESET_NAMES, default=None)
    p.add_argument("--config", default=None, help="JSON run configuration")
    p.add_argument("-N", type=int, default=None, help="highest moment order")
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--sphere-choice", choices=("iso_radius", "sqrt_k"), default=None)
    p.add_argument("--n-radii", type=int, default=None)
    _add_common_output(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("symmetrize", help="decreasing rearrangement onto a cap")
    p.add_argument("--input", required=True, help="CSV of value,weight rows")
    p.add_argument("-d", "--dim", type=int, default=2)
    p.add_argument("-R", type=float, default=1.0, help="target sphere radius")
    p.add_argument("--ambient-volume", type=float, required=True,
                   help="volume of the ambient manifold the sample lives on")
    p.add_argument("--n-radii", type=int, default=4096)
    _add_common_output(p)
    p.set_defaults(func=cmd_symmetrize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ComparisonFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
