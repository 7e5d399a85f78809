"""Sparse Dirichlet Laplacian on masked domains of closed model surfaces.

Two closed surfaces are supported: the flat torus and the round sphere, both
on structured node-centered grids. The Laplacian is assembled in flux form:
for each edge between nodes a, b a symmetric coefficient c_ab, so that

    (S u)_a = sum_b c_ab (u_a - u_b),      S = S^T,

and the weighted operator L = W^(-1) S (W = diagonal metric cell areas) is
self-adjoint in the weighted inner product. Dirichlet conditions are imposed
by masking: edges leaving the interior keep their diagonal contribution,
pinning the boundary values to zero. Sphere pole rows are aggregated into
single pole nodes with exact cap areas, and cell areas are exact metric
integrals, so the weights sum to the surface volume exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import eigsh, splu

from .errors import ConvergenceError, InputError
from .radial_solver import MomentSequence
from .rearrange import WeightedSample
from .spectral import SpectralData

# a GridField is a plain float array over the interior nodes
GridField = np.ndarray

# eigenvalues within this relative distance form one eigenspace
_CLUSTER_TOL = 1e-6

# spectral pairs with smaller a^2 (relative to volume) are dropped as zero-projection
_PROJECTION_TOL = 1e-8

_RESIDUAL_TOL = 1e-10
_EIG_RESIDUAL_TOL = 1e-8

# half-open tolerance for strict-interior predicates
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class FlatTorus:
    """Flat torus of side lengths Lx, Ly on an nx-by-ny periodic grid."""

    Lx: float
    Ly: float
    nx: int
    ny: int

    kind = "flat_torus"

    def __post_init__(self):
        if not (self.Lx > 0 and self.Ly > 0):
            raise InputError("torus side lengths must be positive")
        if self.nx < 16 or self.ny < 16:
            raise InputError("grid resolution must be >= 16")

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny

    @property
    def total_volume(self) -> float:
        return self.Lx * self.Ly

    @property
    def curvature_bound(self) -> float:
        return 0.0

    @property
    def diameter(self) -> float:
        return math.hypot(self.Lx, self.Ly) / 2.0

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        hx, hy = self.Lx / self.nx, self.Ly / self.ny
        i, j = np.divmod(np.arange(self.n_nodes), self.ny)
        return i * hx, j * hy

    def node_weights(self) -> np.ndarray:
        hx, hy = self.Lx / self.nx, self.Ly / self.ny
        return np.full(self.n_nodes, hx * hy)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        hx, hy = self.Lx / self.nx, self.Ly / self.ny
        ids = np.arange(self.n_nodes)
        i, j = np.divmod(ids, self.ny)
        right = ((i + 1) % self.nx) * self.ny + j
        up = i * self.ny + (j + 1) % self.ny
        ea = np.concatenate([ids, ids])
        eb = np.concatenate([right, up])
        coef = np.concatenate(
            [np.full(self.n_nodes, hy / hx), np.full(self.n_nodes, hx / hy)]
        )
        return ea, eb, coef

    def with_resolution(self, factor: float) -> "FlatTorus":
        return FlatTorus(
            self.Lx, self.Ly, int(round(self.nx * factor)), int(round(self.ny * factor))
        )


@dataclass(frozen=True)
class RoundSphere:
    """Round sphere of radius R on an n_theta-by-n_phi latitude grid.

    Interior latitude rows sit at theta = i*h_theta, i = 1..n_theta-1; the two
    pole rows are aggregated into single nodes (ids 0 and n_nodes-1).
    """

    R: float
    n_theta: int
    n_phi: int

    kind = "round_sphere"

    def __post_init__(self):
        if not self.R > 0:
            raise InputError("sphere radius must be positive")
        if self.n_theta < 16 or self.n_phi < 16:
            raise InputError("grid resolution must be >= 16")

    @property
    def n_nodes(self) -> int:
        return 2 + (self.n_theta - 1) * self.n_phi

    @property
    def total_volume(self) -> float:
        return 4.0 * math.pi * self.R**2

    @property
    def curvature_bound(self) -> float:
        return 1.0 / self.R**2

    @property
    def diameter(self) -> float:
        return math.pi * self.R

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        ht = math.pi / self.n_theta
        hp = 2.0 * math.pi / self.n_phi
        theta = np.empty(self.n_nodes)
        phi = np.zeros(self.n_nodes)
        theta[0] = 0.0
        theta[-1] = math.pi
        rows = np.arange(1, self.n_theta)
        theta[1:-1] = np.repeat(rows * ht, self.n_phi)
        phi[1:-1] = np.tile(np.arange(self.n_phi) * hp, self.n_theta - 1)
        return theta, phi

    def node_weights(self) -> np.ndarray:
        ht = math.pi / self.n_theta
        hp = 2.0 * math.pi / self.n_phi
        w = np.empty(self.n_nodes)
        cap = 2.0 * math.pi * self.R**2 * (1.0 - math.cos(ht / 2.0))
        w[0] = w[-1] = cap
        rows = np.arange(1, self.n_theta) * ht
        band = self.R**2 * (np.cos(rows - ht / 2.0) - np.cos(rows + ht / 2.0)) * hp
        w[1:-1] = np.repeat(band, self.n_phi)
        return w

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        nt, nf = self.n_theta, self.n_phi
        ht = math.pi / nt
        hp = 2.0 * math.pi / nf
        row_start = 1 + (np.arange(1, nt) - 1) * nf  # first node id of row i

        ea_parts, eb_parts, c_parts = [], [], []
        # longitudinal edges within each row
        rows = np.arange(1, nt)
        starts = np.repeat(row_start, nf)
        js = np.tile(np.arange(nf), nt - 1)
        ea_parts.append(starts + js)
        eb_parts.append(starts + (js + 1) % nf)
        c_parts.append(np.repeat(ht / (np.sin(rows * ht) * hp), nf))
        # latitudinal edges between consecutive rows
        if nt >= 3:
            rows_a = np.arange(1, nt - 1)
            sa = np.repeat(row_start[:-1], nf)
            sb = np.repeat(row_start[1:], nf)
            js = np.tile(np.arange(nf), nt - 2)
            ea_parts.append(sa + js)
            eb_parts.append(sb + js)
            c_parts.append(np.repeat(np.sin((rows_a + 0.5) * ht) * hp / ht, nf))
        # pole edges
        pole_c = math.sin(ht / 2.0) * hp / ht
        ea_parts.append(np.full(nf, 0))
        eb_parts.append(row_start[0] + np.arange(nf))
        c_parts.append(np.full(nf, pole_c))
        ea_parts.append(np.full(nf, self.n_nodes - 1))
        eb_parts.append(row_start[-1] + np.arange(nf))
        c_parts.append(np.full(nf, pole_c))
        return (
            np.concatenate(ea_parts),
            np.concatenate(eb_parts),
            np.concatenate(c_parts),
        )

    def with_resolution(self, factor: float) -> "RoundSphere":
        return RoundSphere(
            self.R,
            int(round(self.n_theta * factor)),
            int(round(self.n_phi * factor)),
        )


ClosedSurface = FlatTorus | RoundSphere


# ---------------------------------------------------------------------------
# mask specifications


@dataclass(frozen=True)
class CapMask:
    """Geodesic disc: center 'north'/'south' on the sphere, (x0, y0) on the torus."""

    center: object
    radius: float


@dataclass(frozen=True)
class RectMask:
    """Coordinate rectangle: (x0, x1, y0, y1) or (theta0, theta1, phi0, phi1)."""

    bounds: tuple[float, float, float, float]


@dataclass(frozen=True)
class MaskUnion:
    parts: tuple


@dataclass(frozen=True)
class MaskDifference:
    base: object
    cut: object


def _eval_mask(surface: ClosedSurface, spec) -> np.ndarray:
    if isinstance(spec, np.ndarray):
        if spec.shape != (surface.n_nodes,):
            raise InputError("explicit mask length does not match the surface")
        return spec.astype(bool)
    if isinstance(spec, (str, Path)):
        file_surface, mask = read_mask_file(spec)
        if file_surface != surface:
            raise InputError("mask file header does not match the surface")
        return mask
    if isinstance(spec, MaskUnion):
        out = np.zeros(surface.n_nodes, dtype=bool)
        for part in spec.parts:
            out |= _eval_mask(surface, part)
        return out
    if isinstance(spec, MaskDifference):
        return _eval_mask(surface, spec.base) & ~_eval_mask(surface, spec.cut)
    c1, c2 = surface.coords()
    if isinstance(spec, RectMask):
        a0, a1, b0, b1 = spec.bounds
        if isinstance(surface, RoundSphere):
            m = (c1 > a0 + _EDGE_TOL) & (c1 < a1 - _EDGE_TOL)
            if b1 - b0 >= 2.0 * math.pi - _EDGE_TOL:
                return m  # full longitudinal band
            return m & (c2 > b0 + _EDGE_TOL) & (c2 < b1 - _EDGE_TOL)
        # a span covering the full period keeps every node in that coordinate
        if a1 - a0 >= surface.Lx - _EDGE_TOL:
            m = np.ones(surface.n_nodes, dtype=bool)
        else:
            m = (c1 > a0 + _EDGE_TOL) & (c1 < a1 - _EDGE_TOL)
        if b1 - b0 < surface.Ly - _EDGE_TOL:
            m &= (c2 > b0 + _EDGE_TOL) & (c2 < b1 - _EDGE_TOL)
        return m
    if isinstance(spec, CapMask):
        if isinstance(surface, RoundSphere):
            if spec.center == "north":
                return c1 < spec.radius - _EDGE_TOL
            if spec.center == "south":
                return c1 > math.pi - spec.radius + _EDGE_TOL
            raise InputError("sphere caps must be centered 'north' or 'south'")
        try:
            x0, y0 = (float(v) for v in spec.center)
        except (TypeError, ValueError):
            raise InputError("torus caps need a numeric (x, y) center") from None
        dx = np.abs(c1 - x0)
        dx = np.minimum(dx, surface.Lx - dx)
        dy = np.abs(c2 - y0)
        dy = np.minimum(dy, surface.Ly - dy)
        return np.hypot(dx, dy) < spec.radius - _EDGE_TOL
    raise InputError(f"unknown mask specification {spec!r}")


def read_mask_file(path) -> tuple[ClosedSurface, np.ndarray]:
    """Load a plain-text 0/1 mask with its one-line surface header.

    Header: 'flat_torus nx ny Lx Ly' followed by nx rows of ny digits, or
    'round_sphere n_theta n_phi R' followed by (n_theta+1) rows of n_phi
    digits covering both pole rows; pole rows must be constant and cannot be
    interior.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read mask file {path}: {exc}") from None
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"empty mask file {path}")
    head = lines[0].split()
    try:
        if head[0] == "flat_torus":
            nx, ny = int(head[1]), int(head[2])
            surface = FlatTorus(float(head[3]), float(head[4]), nx, ny)
            rows = _parse_mask_rows(lines[1:], nx, ny, path)
            return surface, rows.reshape(-1)
        if head[0] == "round_sphere":
            nt, nf = int(head[1]), int(head[2])
            surface = RoundSphere(float(head[3]), nt, nf)
            rows = _parse_mask_rows(lines[1:], nt + 1, nf, path)
            for r, name in ((rows[0], "north"), (rows[-1], "south")):
                if r.any() and not r.all():
                    raise InputError(f"{name} pole row of {path} must be constant")
                if r.any():
                    raise InputError(
                        f"mask file {path} marks the {name} pole interior; "
                        "poles are only reachable through cap masks"
                    )
            mask = np.zeros(surface.n_nodes, dtype=bool)
            mask[1:-1] = rows[1:-1].reshape(-1)
            return surface, mask
    except (IndexError, ValueError) as exc:
        raise InputError(f"malformed mask file header in {path}: {exc}") from exc
    raise InputError(f"unknown surface kind {head[0]!r} in {path}")


def _parse_mask_rows(lines: list[str], n_rows: int, n_cols: int, path) -> np.ndarray:
    if len(lines) != n_rows:
        raise InputError(f"mask file {path}: expected {n_rows} rows, got {len(lines)}")
    out = np.empty((n_rows, n_cols), dtype=bool)
    for i, ln in enumerate(lines):
        digits = ln.split() if " " in ln else list(ln)
        if len(digits) != n_cols or any(d not in ("0", "1") for d in digits):
            raise InputError(f"mask file {path}: row {i} is not {n_cols} 0/1 entries")
        out[i] = [d == "1" for d in digits]
    return out


def write_mask_file(path, surface: ClosedSurface, mask) -> None:
    """Inverse of read_mask_file (sphere pole rows are emitted as their node value).

    mask may be a boolean node array or any mask specification accepted by
    build_domain. Sphere masks that mark a pole interior are rejected: files
    cannot carry the centered-cap exception, so such domains only build from
    CapMask specifications.
    """
    if not isinstance(mask, np.ndarray):
        mask = _eval_mask(surface, mask)
    if isinstance(surface, RoundSphere) and (mask[0] or mask[-1]):
        raise InputError(
            "mask files cannot mark sphere poles interior; "
            "use a CapMask centered at the pole instead"
        )
    lines = []
    if isinstance(surface, FlatTorus):
        lines.append(f"flat_torus {surface.nx} {surface.ny} {surface.Lx} {surface.Ly}")
        body = mask.reshape(surface.nx, surface.ny)
        lines += ["".join("1" if v else "0" for v in row) for row in body]
    else:
        lines.append(f"round_sphere {surface.n_theta} {surface.n_phi} {surface.R}")
        nf = surface.n_phi
        lines.append(("1" if mask[0] else "0") * nf)
        body = mask[1:-1].reshape(surface.n_theta - 1, nf)
        lines += ["".join("1" if v else "0" for v in row) for row in body]
        lines.append(("1" if mask[-1] else "0") * nf)
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# domains


@dataclass
class GridDomain:
    """Masked interior of a closed surface with its assembled Dirichlet operator.

    volume counts, besides the interior cells, half of each boundary-ring
    cell per interior-facing edge: the half-cell strip the zero boundary
    condition cuts through. For grid-aligned boundaries this is exact.
    """

    surface: ClosedSurface
    interior_mask: np.ndarray = field(repr=False)
    node_volume: np.ndarray = field(repr=False)
    matrix: sp.csr_matrix = field(repr=False)
    weights: np.ndarray = field(repr=False)
    interior_ids: np.ndarray = field(repr=False)
    volume: float
    volume_plain: float
    n_components: int
    mask_spec: object = field(default=None, repr=False)
    _lu: object = field(default=None, repr=False, compare=False)

    @property
    def n_interior(self) -> int:
        return len(self.interior_ids)

    def solver(self):
        if self._lu is None:
            self._lu = splu(self.matrix.tocsc())
        return self._lu

    def coarsened(self, factor: float = 0.5) -> "GridDomain":
        """Rebuild the domain at a scaled resolution (for error budgets)."""
        if self.mask_spec is None or isinstance(self.mask_spec, (np.ndarray, str, Path)):
            raise InputError("cannot rescale a domain built from an explicit mask")
        return build_domain(self.surface.with_resolution(factor), self.mask_spec)


def build_domain(surface: ClosedSurface, mask_spec) -> GridDomain:
    """Assemble the Dirichlet operator for the interior selected by mask_spec.

    mask_spec is a CapMask, RectMask, MaskUnion, MaskDifference, a mask file
    path, or an explicit boolean array. Sphere poles may be interior only as
    centers of cap masks.
    """
    mask = _eval_mask(surface, mask_spec)
    if not mask.any():
        raise InputError("mask selects an empty interior")
    if mask.all():
        raise InputError("mask selects the whole surface; the complement is empty")
    if isinstance(surface, RoundSphere):
        for node, name in ((0, "north"), (surface.n_nodes - 1, "south")):
            if mask[node] and not (
                isinstance(mask_spec, CapMask) and mask_spec.center == name
            ):
                raise InputError(
                    f"domain touches the {name} pole; poles are only supported "
                    "as centers of cap masks"
                )
    w_full = surface.node_weights()
    ea, eb, coef = surface.edges()
    ids = np.nonzero(mask)[0]
    pos = -np.ones(surface.n_nodes, dtype=np.int64)
    pos[ids] = np.arange(len(ids))
    a, b = pos[ea], pos[eb]
    in_a, in_b = a >= 0, b >= 0
    both = in_a & in_b
    diag = np.zeros(len(ids))
    np.add.at(diag, a[in_a], coef[in_a])
    np.add.at(diag, b[in_b], coef[in_b])
    rows = np.concatenate([a[both], b[both], np.arange(len(ids))])
    cols = np.concatenate([b[both], a[both], np.arange(len(ids))])
    vals = np.concatenate([-coef[both], -coef[both], diag])
    S = sp.csr_matrix((vals, (rows, cols)), shape=(len(ids), len(ids)))
    # half of each masked ring cell, once per interior-facing edge
    ring = 0.5 * (
        w_full[eb[in_a & ~in_b]].sum() + w_full[ea[in_b & ~in_a]].sum()
    )
    weights = w_full[ids]
    adj = sp.csr_matrix(
        (np.ones(both.sum()), (a[both], b[both])), shape=(len(ids), len(ids))
    )
    n_comp = connected_components(adj, directed=False, return_labels=False)
    return GridDomain(
        surface=surface,
        interior_mask=mask,
        node_volume=w_full,
        matrix=S,
        weights=weights,
        interior_ids=ids,
        volume=float(weights.sum() + ring),
        volume_plain=float(weights.sum()),
        n_components=int(n_comp),
        mask_spec=mask_spec,
    )


def poisson_solve(domain: GridDomain, rhs: GridField) -> GridField:
    """Solve L u = rhs (L = W^(-1) S) with zero boundary values.

    Sparse direct factorization with one step of iterative refinement; raises
    ConvergenceError if the weighted residual exceeds 1e-10 * ||rhs||.
    """
    f = np.asarray(rhs, dtype=float)
    if f.shape != (domain.n_interior,):
        raise InputError("rhs length does not match the interior")
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise InputError("rhs must be nonnegative")
    w = domain.weights
    target = w * f
    lu = domain.solver()
    u = lu.solve(target)
    norm_rhs = math.sqrt(float(np.sum(target**2 / w)))
    for _ in range(2):
        r = target - domain.matrix @ u
        res = math.sqrt(float(np.sum(r**2 / w)))
        if res <= _RESIDUAL_TOL * max(norm_rhs, 1e-300):
            return u
        u = u + lu.solve(r)
    raise ConvergenceError(
        f"poisson residual {res:.3e} exceeds {_RESIDUAL_TOL:.0e} * ||rhs||"
    )


def moment_hierarchy_grid(
    domain: GridDomain, N: int
) -> tuple[MomentSequence, list[GridField]]:
    """Moment fields u_1..u_N on the grid and T_n = sum w_i u_n(i)."""
    if N < 1:
        raise InputError("N must be >= 1")
    u_prev = np.ones(domain.n_interior)
    fields: list[GridField] = []
    moments = np.empty(N)
    for n in range(1, N + 1):
        u_n = poisson_solve(domain, n * u_prev)
        moments[n - 1] = float(domain.weights @ u_n)
        fields.append(u_n)
        u_prev = u_n
    return MomentSequence(volume=domain.volume, moments=moments), fields


@dataclass(frozen=True)
class EigenResult:
    """Low Dirichlet eigenpairs with the spectral data they induce.

    spectral keeps one (nu, a_sq) pair per eigenvalue cluster whose projection
    of 1 is nonnegligible (a_sq > 1e-8 * volume): the part of the spectrum
    visible to moments. eigenvalues/fields/residuals cover all computed pairs.
    """

    spectral: SpectralData
    eigenvalues: np.ndarray
    fields: np.ndarray
    residuals: np.ndarray
    clusters: list[list[int]]


def dirichlet_eigenpairs(domain: GridDomain, m: int) -> EigenResult:
    """The m smallest Dirichlet eigenpairs of the domain.

    Shift-invert Lanczos at sigma = 0 with a fixed deterministic start vector;
    eigenfields are orthonormal in the weighted inner product. Eigenvalues
    within 1e-6 relative are clustered into one eigenspace for the projection
    sums a_sq = sum over the cluster of (sum_i w_i phi(i))^2.
    """
    if m < 1:
        raise InputError("m must be >= 1")
    if m >= domain.n_interior:
        raise InputError(f"m={m} too large for {domain.n_interior} interior nodes")
    w = domain.weights
    M = sp.diags(w).tocsc()
    lam, vec = eigsh(
        domain.matrix,
        k=m,
        M=M,
        sigma=0.0,
        which="LM",
        v0=np.ones(domain.n_interior),
    )
    order = np.argsort(lam)
    lam = lam[order]
    vec = vec[:, order]
    res = np.empty(m)
    for i in range(m):
        r = domain.matrix @ vec[:, i] - lam[i] * (w * vec[:, i])
        res[i] = math.sqrt(float(np.sum(r**2 / w)))
    bad = res > _EIG_RESIDUAL_TOL * np.maximum(1.0, lam)
    if bad.any():
        raise ConvergenceError(
            f"eigenpairs {np.nonzero(bad)[0].tolist()} exceed the residual bound"
        )
    clusters: list[list[int]] = [[0]]
    for i in range(1, m):
        if lam[i] <= lam[clusters[-1][0]] * (1.0 + _CLUSTER_TOL):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    pairs = []
    for members in clusters:
        a_sq = float(sum((w @ vec[:, i]) ** 2 for i in members))
        nu = float(np.mean(lam[members]))
        if a_sq > _PROJECTION_TOL * domain.volume:
            pairs.append((nu, a_sq))
    spectral = SpectralData(
        volume=domain.volume, pairs=np.array(pairs).reshape(-1, 2)
    )
    return EigenResult(
        spectral=spectral,
        eigenvalues=lam,
        fields=vec,
        residuals=res,
        clusters=clusters,
    )


def weighted_sample(domain: GridDomain, values: GridField) -> WeightedSample:
    """Sample of a grid field with weights rescaled to the corrected volume.

    The rescale (volume / plain cell sum) keeps the sample's total measure
    consistent with GridDomain.volume, which is what the symmetrization
    normalization compares against.
    """
    v = np.asarray(values, dtype=float)
    if v.shape != (domain.n_interior,):
        raise InputError("field length does not match the interior")
    scale = domain.volume / domain.volume_plain
    return WeightedSample(
        values=v,
        weights=domain.weights * scale,
        domain_volume=domain.volume,
        ambient_volume=domain.surface.total_volume,
    )
