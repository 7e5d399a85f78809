"""Dictionary between moment sequences and Dirichlet spectral data.

The moments of a domain, the eigenvalue/projection pairs (nu_k, a_k^2) with
nonzero projection of 1, and the heat content are linked by the Dirichlet
series identity

    T_n / n! = sum_k a_k^2 nu_k^(-n),

which this module evaluates forward (moments_from_spectrum, heat_content),
inverts by iterative peeling (recover_spectrum), and turns into lower-spectrum
eigenvalue bounds from consecutive moments (eigenvalue_bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .radial_solver import MomentSequence

_EPS = float(np.finfo(float).eps)

# largest n with float-representable n!
_MAX_FACTORIAL_N = 170

# relative slack on the log-convexity test z_{n}^2 <= z_{n-1} z_{n+1}
_CONVEXITY_TOL = 1e-9

# a new eigenvalue must exceed the previous by this relative separation
_SEPARATION_TOL = 0.05


@dataclass(frozen=True)
class SpectralData:
    """Volume with (nu, a_sq) pairs: eigenvalues carrying nonzero projection of 1."""

    volume: float
    pairs: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.pairs, dtype=float))
        if p.size == 0:
            p = p.reshape(0, 2)
        object.__setattr__(self, "pairs", p)
        if p.ndim != 2 or p.shape[1] != 2:
            raise InputError("pairs must be an (m, 2) array of (nu, a_sq)")
        if not self.volume > 0:
            raise InputError("volume must be positive")
        if len(p) > 0:
            if np.any(p[:, 0] <= 0) or np.any(p[:, 1] <= 0):
                raise InputError("eigenvalues and projections must be positive")
            if np.any(np.diff(p[:, 0]) <= 0):
                raise InputError("eigenvalues must increase strictly")
            if p[:, 1].sum() > self.volume * (1 + 1e-9):
                raise InputError("sum of a_sq exceeds the volume")

    @property
    def nus(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def a_sqs(self) -> np.ndarray:
        return self.pairs[:, 1]

    def to_dict(self) -> dict:
        return {
            "volume": self.volume,
            "pairs": [{"nu": float(nu), "a_sq": float(a)} for nu, a in self.pairs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralData":
        try:
            pairs = np.array([[p["nu"], p["a_sq"]] for p in d["pairs"]], dtype=float)
            return cls(volume=float(d["volume"]), pairs=pairs.reshape(-1, 2))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed spectral data: {exc}") from exc


@dataclass(frozen=True)
class EigenBoundReport:
    """Upper bound for the n-th Dirichlet eigenvalue from order-k moments."""

    n: int
    k: int
    bound: float
    vacuous: bool
    subtracted_terms: np.ndarray = field(compare=False)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "bound": self.bound, "vacuous": self.vacuous}


@dataclass(frozen=True)
class RecoveryResult:
    """Recovered spectral pairs with per-pair extrapolation error estimates.

    pair_errors[i] = (delta_nu, delta_a_sq), the difference between the last
    two extrapolants for pair i. stop_reason is None when max_pairs were
    extracted, otherwise the reported reason recovery halted.
    """

    spectrum: SpectralData
    pair_errors: np.ndarray
    stop_reason: str | None
    usable_counts: list[int]


def _factorial(n: int) -> float:
    if n > _MAX_FACTORIAL_N:
        raise InputError(f"moment order {n} exceeds double-precision factorials")
    return float(math.factorial(n))


def _scaled_moments(moments: MomentSequence) -> np.ndarray:
    """z_n = T_n / n!, the Dirichlet-series values."""
    return np.array(
        [t / _factorial(n + 1) for n, t in enumerate(moments.moments)]
    )


def moments_from_spectrum(spec: SpectralData, N: int) -> MomentSequence:
    """T_n = n! sum_k a_k^2 nu_k^(-n) for n = 1..N, with truncation tail bounds.

    The tail bound (volume - sum a_sq) * nu_last^(-n) * n! uses that every
    omitted eigenvalue exceeds the last included one.
    """
    if N < 1:
        raise InputError("N must be >= 1")
    if len(spec.pairs) == 0:
        raise InputError("spectral data has no pairs")
    nus = spec.nus
    asq = spec.a_sqs
    defect = max(spec.volume - math.fsum(asq), 0.0)
    moments = np.empty(N)
    tails = np.empty(N)
    for n in range(1, N + 1):
        fac = _factorial(n)
        z = math.fsum(a * nu ** (-float(n)) for nu, a in zip(nus, asq))
        moments[n - 1] = fac * z
        tails[n - 1] = defect * nus[-1] ** (-float(n)) * fac
    return MomentSequence(volume=spec.volume, moments=moments, tail_bounds=tails)


def heat_content(spec: SpectralData, t: float) -> float:
    """H(t) = sum_k a_k^2 exp(-nu_k t), the truncated heat content."""
    if not t > 0:
        raise InputError("t must be positive")
    return math.fsum(a * math.exp(-nu * t) for nu, a in spec.pairs)


def volume_partition_defect(spec: SpectralData) -> float:
    """volume - sum a_sq: the part of the volume partition not yet captured."""
    return spec.volume - math.fsum(spec.a_sqs)


def _aitken(a: float, b: float, c: float) -> float:
    d = (c - b) - (b - a)
    if d == 0.0:
        return c
    return c - (c - b) ** 2 / d


def recover_spectrum(
    moments: MomentSequence,
    max_pairs: int,
    noise_rel: float | None = None,
) -> RecoveryResult:
    """Recover (nu_k, a_k^2) pairs from moments by ratio extrapolation and peeling.

    For the residual series y_n (initially T_n/n!), the consecutive ratios
    y_{n+1}/y_n increase toward 1/nu of the smallest remaining eigenvalue; one
    Aitken step on the last three usable ratios gives nu, then the same
    extrapolation on nu^n y_n gives a^2. The pair is subtracted and the
    process repeats.

    The usable prefix of y ends at the first log-convexity violation
    (y_n^2 > y_{n-1} y_{n+1}, impossible for an exact positive Dirichlet
    series) or at 10x the relative noise floor of the inputs (noise_rel,
    default machine epsilon). Recovery stops before fitting noise: fewer than
    four usable moments, a nonpositive or non-separated eigenvalue estimate,
    a nonpositive amplitude, or an exhausted volume partition all halt with a
    reported reason.
    """
    if max_pairs < 1:
        raise InputError("max_pairs must be >= 1")
    if moments.n_max < 8:
        raise InputError("need at least 8 moments to extrapolate")
    z0 = _scaled_moments(moments)
    floor = 10.0 * (noise_rel if noise_rel is not None else _EPS) * np.abs(z0)
    y = z0.copy()
    n_all = len(y)
    pairs: list[tuple[float, float]] = []
    errors: list[tuple[float, float]] = []
    usable_counts: list[int] = []
    stop: str | None = None
    for _ in range(max_pairs):
        m = 0
        while m < n_all and y[m] > floor[m]:
            if m >= 2 and y[m - 1] ** 2 > y[m - 2] * y[m] * (1.0 + _CONVEXITY_TOL):
                break
            m += 1
        if m < 4:
            stop = f"noise floor reached ({m} usable moments)"
            break
        r = y[1:m] / y[: m - 1]
        r_hat = _aitken(r[-3], r[-2], r[-1])
        r_prev = _aitken(r[-4], r[-3], r[-2]) if m >= 5 else r[-2]
        if not r_hat > 0:
            stop = "nonpositive eigenvalue estimate"
            break
        nu = 1.0 / r_hat
        if pairs and nu <= pairs[-1][0] * (1.0 + _SEPARATION_TOL):
            stop = "eigenvalue estimate not separated from the previous pair"
            break
        nu_err = abs(1.0 / r_hat - 1.0 / r_prev) if r_prev > 0 else math.inf
        # amplitudes b_n = nu^n y_n -> a^2, in log space to avoid overflow
        log_nu = math.log(nu)
        b = np.exp(np.arange(1, m + 1) * log_nu + np.log(y[:m]))
        b_hat = _aitken(b[-3], b[-2], b[-1])
        b_prev = _aitken(b[-4], b[-3], b[-2]) if m >= 5 else b[-2]
        if not b_hat > 0:
            stop = "nonpositive amplitude estimate"
            break
        if math.fsum(a for _, a in pairs) + b_hat > moments.volume * (1 + 1e-9):
            stop = "volume partition exceeded"
            break
        pairs.append((nu, b_hat))
        errors.append((nu_err, abs(b_hat - b_prev)))
        usable_counts.append(m)
        y = y - b_hat * np.exp(-np.arange(1, n_all + 1) * log_nu)
    spectrum = SpectralData(
        volume=moments.volume, pairs=np.array(pairs, dtype=float).reshape(-1, 2)
    )
    return RecoveryResult(
        spectrum=spectrum,
        pair_errors=np.array(errors, dtype=float).reshape(-1, 2),
        stop_reason=stop,
        usable_counts=usable_counts,
    )


def eigenvalue_bound(
    moments: MomentSequence,
    known_below: SpectralData | None,
    n: int,
    k: int,
    spectrum: SpectralData | None = None,
) -> EigenBoundReport:
    """Upper bound for lambda_n from the order-(2k-1, 2k) moments.

    bound = [T_{2k-1}/(2k-1)! - S_{2k-1}] / [T_{2k}/(2k)! - S_{2k}] where
    S_m = sum a^2 nu^(-m) over the supplied pairs below lambda_n. When the
    full spectrum is supplied, the bracketed differences are evaluated as
    direct tail sums over the remaining pairs instead, avoiding the
    catastrophic cancellation of the subtraction at large k. A nonpositive
    difference within the noise floor is reported as vacuous (bound = inf)
    rather than raised.
    """
    if k < 1 or n < 1:
        raise InputError("n and k must be >= 1")
    subtracted = (
        known_below.pairs if known_below is not None else np.empty((0, 2))
    )
    if spectrum is not None:
        cut = subtracted[:, 0].max() if len(subtracted) else 0.0
        tail = spectrum.pairs[spectrum.pairs[:, 0] > cut]
        if len(tail) == 0:
            return EigenBoundReport(n, k, math.inf, True, subtracted)
        num = math.fsum(a * nu ** (1.0 - 2 * k) for nu, a in tail)
        den = math.fsum(a * nu ** (-2.0 * k) for nu, a in tail)
        noise = 0.0
    else:
        if 2 * k > moments.n_max:
            raise InputError(f"k={k} needs T_{2*k}, have {moments.n_max} moments")
        z = _scaled_moments(moments)
        z_odd, z_even = z[2 * k - 2], z[2 * k - 1]
        num = math.fsum(
            [z_odd] + [-a * nu ** (1.0 - 2 * k) for nu, a in subtracted]
        )
        den = math.fsum(
            [z_even] + [-a * nu ** (-2.0 * k) for nu, a in subtracted]
        )
        noise = 10.0 * _EPS * max(abs(z_odd), abs(z_even))
    if den <= noise or num <= noise:
        return EigenBoundReport(n, k, math.inf, True, subtracted)
    return EigenBoundReport(n, k, num / den, False, subtracted)
