"""
Spectral Analysis
Eigenvalues of truncated squeezing Hamiltonians: +/- pairing, zero modes,
smallest positive eigenvalues, power-law fits, large-eigenvalue scaling and
vacuum localization of eigenvectors
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.optimize import minimize_scalar

from ..config import AppConfig
from ..exceptions import FitError, SpectrumConvergenceError, SpectrumError
from .operators import JacobiMatrix, TruncationSpec, build_hamiltonian

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 8
MIN_SCALING_POINTS = 3

# Bisection absolute tolerance; relative accuracy then comes from LAPACK's own ulp test
_BISECTION_TOL = 2.0 * np.finfo(float).tiny


@dataclass(frozen=True)
class SpectrumResult:
    """Sorted eigenvalues (optionally eigenvectors as columns) of one Jacobi matrix"""
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    relative_accuracy: bool = False
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.dim else 0.0

    def zero_threshold(self, config: Optional[AppConfig] = None) -> float:
        """|lambda| at or below which an eigenvalue counts as a zero mode"""
        config = config or AppConfig()
        tol = config.chiral_zero_tol if self.relative_accuracy else config.zero_tol
        return tol * self.scale

    def positive(self, config: Optional[AppConfig] = None) -> np.ndarray:
        """Strictly positive eigenvalues, ascending"""
        return self.eigenvalues[self.eigenvalues > self.zero_threshold(config)]

    def nonnegative(self, config: Optional[AppConfig] = None) -> np.ndarray:
        """Zero modes (as exact zeros) followed by the positive eigenvalues"""
        zeros = np.zeros(len(zero_modes(self, config)))
        return np.concatenate([zeros, self.positive(config)])


@dataclass(frozen=True)
class PowerLawFit:
    """E = alpha * j**gamma fitted as a straight line in log-log coordinates"""
    alpha: float
    gamma: float
    r_squared: float
    index_range: Tuple[int, int]


@dataclass(frozen=True)
class ScalingFit(PowerLawFit):
    """Largest-eigenvalue fit plus the companion index tracks"""
    dims: Tuple[int, ...] = ()
    values: Dict[str, np.ndarray] = field(default_factory=dict)
    tracks: Dict[str, PowerLawFit] = field(default_factory=dict)


@dataclass(frozen=True)
class SmallEigenvalueTrack:
    """The smallest positive eigenvalues followed across truncation sizes"""
    n: int
    dims: Tuple[int, ...]
    values: np.ndarray  # shape (len(dims), count)
    slope: float  # log-log slope of the smallest one


@dataclass(frozen=True)
class AsymptoteFit:
    """Straight-line fit of log|lambda_min(N) - lambda_inf| against log N"""
    lambda_inf: float
    slope: float
    intercept: float
    r_squared: float
    extrapolation_ratio: float  # distance of lambda_inf from the last point over the data spread
    dims: Tuple[int, int]


def _failing_index(error: Exception) -> int:
    match = re.search(r"(\d+)", str(error))
    return int(match.group(1)) if match else -1


def spectrum(H: JacobiMatrix, want_vectors: bool = False, refine: Optional[bool] = None,
             label: str = "") -> SpectrumResult:
    """
    All eigenvalues of a Jacobi matrix, ascending

    Args:
        H: Jacobi matrix
        want_vectors: also return eigenvectors (MRRR)
        refine: recompute eigenvalues by Sturm bisection; defaults to True for
            zero-diagonal matrices, whose eigenvalues bisection resolves to high
            relative accuracy
    """
    d = np.asarray(H.diag, dtype=float)
    e = np.asarray(H.offdiag, dtype=float)
    chiral = not H.has_kerr
    refine = chiral if refine is None else refine

    if H.dim == 1:
        vectors = np.ones((1, 1)) if want_vectors else None
        return SpectrumResult(d.copy(), vectors, relative_accuracy=chiral, label=label)

    vectors = None
    try:
        if want_vectors:
            values, vectors = eigh_tridiagonal(d, e, check_finite=False)
        if refine:
            values = eigvalsh_tridiagonal(d, e, lapack_driver="stebz", tol=_BISECTION_TOL,
                                          check_finite=False)
        elif not want_vectors:
            values = eigvalsh_tridiagonal(d, e, check_finite=False)
    except LinAlgError as error:
        raise SpectrumConvergenceError(_failing_index(error), f"({error})") from error

    # Both drivers return ascending values, so MRRR columns line up with bisection values
    values = np.sort(values)
    logger.debug("spectrum %s: dim=%d scale=%.3e refine=%s", label, H.dim,
                 float(np.max(np.abs(values))), refine)
    return SpectrumResult(values, vectors, relative_accuracy=bool(refine and chiral), label=label)


def selected_eigenvalues(H: JacobiMatrix, indices: Sequence[int]) -> np.ndarray:
    """Eigenvalues at the given ascending indices, by bisection"""
    d = np.asarray(H.diag, dtype=float)
    e = np.asarray(H.offdiag, dtype=float)
    out = []
    for index in indices:
        try:
            value = eigvalsh_tridiagonal(d, e, select="i", select_range=(index, index),
                                         lapack_driver="stebz", check_finite=False)
        except LinAlgError as error:
            raise SpectrumConvergenceError(index, f"({error})") from error
        out.append(float(value[0]))
    return np.array(out)


def symmetry_defect(s: SpectrumResult) -> float:
    """max |lambda_k + lambda_{dim-1-k}| normalized by max |lambda|"""
    if s.dim == 0 or s.scale == 0:
        return 0.0
    return float(np.max(np.abs(s.eigenvalues + s.eigenvalues[::-1])) / s.scale)


def zero_modes(s: SpectrumResult, config: Optional[AppConfig] = None) -> np.ndarray:
    """Indices of eigenvalues within the zero threshold"""
    return np.flatnonzero(np.abs(s.eigenvalues) <= s.zero_threshold(config))


def min_gap(s: SpectrumResult) -> float:
    return float(np.min(np.diff(s.eigenvalues))) if s.dim > 1 else float("inf")


def level_spacing(s: SpectrumResult, half_width: int = 10) -> np.ndarray:
    """Level spacings in a window around the spectrum center"""
    center = s.dim // 2
    lo = max(center - half_width, 0)
    hi = min(center + half_width + 1, s.dim)
    return np.diff(s.eigenvalues[lo:hi])


def smallest_positive(s: SpectrumResult, config: Optional[AppConfig] = None) -> float:
    """Smallest eigenvalue strictly above the zero threshold"""
    positive = s.positive(config)
    if len(positive) == 0:
        raise SpectrumError(f"spectrum {s.label} has no positive eigenvalue")
    return float(positive[0])


def smallest_positive_eigenvalues(s: SpectrumResult, count: int = 10,
                                  config: Optional[AppConfig] = None) -> np.ndarray:
    positive = s.positive(config)
    if len(positive) < count:
        raise SpectrumError(f"spectrum {s.label} has only {len(positive)} positive eigenvalues")
    return positive[:count].copy()


def _loglog_fit(x: np.ndarray, y: np.ndarray, min_points: int) -> Tuple[float, float, float]:
    """Least-squares line through (log x, log y); returns (alpha, gamma, r_squared)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < min_points:
        raise FitError(f"power-law fit needs at least {min_points} points, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("power-law fit needs strictly positive indices and values")
    lx, ly = np.log(x), np.log(y)
    gamma, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (gamma * lx + intercept)
    total = np.sum((ly - ly.mean()) ** 2)
    r_squared = 1.0 - float(np.sum(residual ** 2) / total) if total > 0 else 1.0
    return float(np.exp(intercept)), float(gamma), min(max(r_squared, 0.0), 1.0)


def default_window(dim: int, config: Optional[AppConfig] = None) -> Tuple[int, int]:
    """Fit window [j_min, floor(fraction * dim)] counted from the spectrum center"""
    config = config or AppConfig()
    return config.fit_j_min, int(np.floor(config.fit_j_max_fraction * dim))


def _fit_sequence(values: np.ndarray, j_min: int, j_max: int, offset: float = 0.0) -> PowerLawFit:
    """Fit values[j] = alpha (j - offset)^gamma for j in [j_min, j_max] (values[0] is index 0)"""
    j = np.arange(len(values))
    mask = (j >= max(j_min, 1)) & (j <= j_max)
    alpha, gamma, r_squared = _loglog_fit(j[mask] - offset, values[mask], MIN_FIT_POINTS)
    logger.debug("fit window [%d, %d]: gamma=%.4f r2=%.6f", j_min, j_max, gamma, r_squared)
    return PowerLawFit(alpha, gamma, r_squared, (int(max(j_min, 1)), int(min(j_max, len(values) - 1))))


def _half_shifted(s: SpectrumResult, config: Optional[AppConfig] = None) -> bool:
    """Paired spectrum without a zero mode: its levels sit between those of dim +/- 1"""
    return len(zero_modes(s, config)) == 0 and symmetry_defect(s) <= 1e-8


def fit_power_law(s: SpectrumResult, j_min: Optional[int] = None, j_max: Optional[int] = None,
                  config: Optional[AppConfig] = None) -> PowerLawFit:
    """
    Fit E_j = alpha j^gamma to the positive eigenvalues

    The j-th positive eigenvalue (j = 1, 2, ...) sits at index j; a zero mode, if
    present, is index 0 and never enters the fit. A paired spectrum without a
    zero mode interlaces with one that has it, so its levels are placed at j - 1/2.
    """
    default_min, default_max = default_window(s.dim, config)
    j_min = default_min if j_min is None else j_min
    j_max = default_max if j_max is None else j_max
    values = np.concatenate([[0.0], s.positive(config)])
    return _fit_sequence(values, j_min, j_max, 0.5 if _half_shifted(s, config) else 0.0)


def interleaved_fit(even: SpectrumResult, odd: SpectrumResult, j_min: Optional[int] = None,
                    j_max: Optional[int] = None, config: Optional[AppConfig] = None) -> PowerLawFit:
    """
    Fit the alternating merge of two neighbouring spectra

    Eigenvalues of N and N+1 interlace, so the sorted union of their non-negative
    parts alternates between the two. The merged index runs twice as fast, so the
    window is doubled.
    """
    if abs(even.dim - odd.dim) != 1:
        raise FitError(f"interleaving needs dimensions differing by 1, got {even.dim} and {odd.dim}")
    default_min, default_max = default_window(min(even.dim, odd.dim), config)
    j_min = 2 * default_min if j_min is None else j_min
    j_max = 2 * default_max if j_max is None else j_max
    merged = np.sort(np.concatenate([even.nonnegative(config), odd.nonnegative(config)]))
    if merged[0] != 0.0:
        merged = np.concatenate([[0.0], merged])
    return _fit_sequence(merged, j_min, j_max)


def eigenvalue_tracks(n: int, dims: Sequence[int]) -> Dict[str, np.ndarray]:
    """Eigenvalues at indices N-1, floor(3N/4) and floor(11N/20) for each N"""
    tracks: Dict[str, List[float]] = {"largest": [], "three_quarter": [], "eleven_twentieth": []}
    for dim in dims:
        H = build_hamiltonian(TruncationSpec(n, dim))
        picked = selected_eigenvalues(H, [dim - 1, (3 * dim) // 4, (11 * dim) // 20])
        tracks["largest"].append(picked[0])
        tracks["three_quarter"].append(picked[1])
        tracks["eleven_twentieth"].append(picked[2])
    return {name: np.array(values) for name, values in tracks.items()}


def largest_eigenvalue_scaling(n: int, dims: Sequence[int]) -> ScalingFit:
    """Power-law exponent of the largest eigenvalue in N, with companion tracks"""
    dims = tuple(int(d) for d in dims)
    if list(dims) != sorted(dims) or any(d % 2 for d in dims):
        raise FitError(f"dims must be ascending and even, got {dims}")
    values = eigenvalue_tracks(n, dims)
    x = np.array(dims, dtype=float)
    tracks = {}
    for name, track in values.items():
        alpha, gamma, r_squared = _loglog_fit(x, track, MIN_SCALING_POINTS)
        tracks[name] = PowerLawFit(alpha, gamma, r_squared, (dims[0], dims[-1]))
    largest = tracks["largest"]
    logger.info("n=%d largest-eigenvalue exponent %.4f", n, largest.gamma)
    return ScalingFit(largest.alpha, largest.gamma, largest.r_squared, largest.index_range,
                      dims=dims, values=values, tracks=tracks)


def vacuum_weights(s: SpectrumResult) -> np.ndarray:
    """|<e_0|v_k>|^2 for every eigenvector"""
    if s.eigenvectors is None:
        raise SpectrumError(f"spectrum {s.label} was computed without eigenvectors")
    return np.abs(s.eigenvectors[0, :]) ** 2


def vacuum_overlap_profile(s: SpectrumResult, half_width: int = 5) -> np.ndarray:
    """Vacuum weights of the eigenvectors in a window around the spectrum center"""
    weights = vacuum_weights(s)
    center = s.dim // 2
    lo = max(center - half_width, 0)
    return weights[lo:min(center + half_width + 1, s.dim)]


def central_vacuum_weight(s: SpectrumResult) -> float:
    """Vacuum weight on the central eigenvector (odd) or central pair (even)"""
    weights = vacuum_weights(s)
    center = s.dim // 2
    if s.dim % 2:
        return float(weights[center])
    return float(weights[center - 1] + weights[center])


def smallest_positive_vs_dim(n: int, dims: Sequence[int], count: int = 10,
                             config: Optional[AppConfig] = None) -> SmallEigenvalueTrack:
    """The `count` smallest positive eigenvalues for each truncation size"""
    dims = tuple(int(d) for d in dims)
    rows = []
    for dim in dims:
        s = spectrum(build_hamiltonian(TruncationSpec(n, dim)), label=f"n{n}_N{dim}")
        rows.append(smallest_positive_eigenvalues(s, count, config))
    values = np.vstack(rows)
    slope = _loglog_fit(np.array(dims, dtype=float), values[:, 0], 2)[1] if len(dims) > 1 else 0.0
    return SmallEigenvalueTrack(n, dims, values, slope)


def extrapolate_smallest(dims: Sequence[int], values: Sequence[float]) -> AsymptoteFit:
    """
    Asymptotic value of a converging sequence lambda_min(N)

    Searches lambda_inf so that log|lambda_min(N) - lambda_inf| is as straight as
    possible in log N (maximal r^2). The ratio of the extrapolation distance to
    the data spread says how far outside the data the estimate lies.
    """
    x = np.log(np.asarray(dims, dtype=float))
    y = np.asarray(values, dtype=float)
    if len(y) < MIN_SCALING_POINTS:
        raise FitError(f"extrapolation needs at least {MIN_SCALING_POINTS} points")
    spread = float(np.ptp(y)) or abs(float(y[-1])) or 1.0
    decreasing = y[-1] < y[0]
    if decreasing:
        bounds = (min(0.0, float(y.min()) - 10 * spread), float(y.min()) - 1e-9 * spread)
    else:
        bounds = (float(y.max()) + 1e-9 * spread, float(y.max()) + 10 * spread)

    def line(lambda_inf: float) -> Tuple[float, float, float]:
        gap = np.abs(y - lambda_inf)
        slope, intercept = np.polyfit(x, np.log(gap), 1)
        fitted = slope * x + intercept
        ly = np.log(gap)
        total = np.sum((ly - ly.mean()) ** 2)
        r_squared = 1.0 - np.sum((ly - fitted) ** 2) / total if total > 0 else 1.0
        return float(slope), float(intercept), float(r_squared)

    result = minimize_scalar(lambda v: -line(v)[2], bounds=bounds, method="bounded")
    lambda_inf = float(result.x)
    slope, intercept, r_squared = line(lambda_inf)
    ratio = abs(lambda_inf - float(y[-1])) / spread
    return AsymptoteFit(lambda_inf, slope, intercept, r_squared, ratio, (int(dims[0]), int(dims[-1])))


def _exact_couplings_squared(spec: TruncationSpec) -> List[int]:
    out = []
    for j in range(spec.dim - 1):
        product = 1
        for k in range(1, spec.n + 1):
            product *= spec.n * j + k
        out.append(product)
    return out


def _exact_diagonal(spec: TruncationSpec) -> List[Fraction]:
    if spec.kerr is None:
        return [Fraction(0)] * spec.dim
    coefficient = Fraction(spec.kerr.strength)
    if spec.kerr.order == 4:
        coefficient /= 24
    out = []
    for j in range(spec.dim):
        m = spec.n * j
        falling = 1
        for k in range(spec.kerr.order):
            falling *= max(m - k, 0)
        out.append(coefficient * falling)
    return out


def charpoly_coefficients(spec: TruncationSpec) -> List[Fraction]:
    """Exact coefficients of det(x - T), highest degree first"""
    t2 = _exact_couplings_squared(spec)
    d = _exact_diagonal(spec)
    # p_k(x) = (x - d_{k-1}) p_{k-1}(x) - t_{k-2}^2 p_{k-2}(x), stored lowest degree first
    prev: List[Fraction] = [Fraction(1)]
    curr: List[Fraction] = [-d[0], Fraction(1)]
    for k in range(2, spec.dim + 1):
        nxt = [Fraction(0)] * (k + 1)
        for i, c in enumerate(curr):
            nxt[i + 1] += c
            nxt[i] -= d[k - 1] * c
        for i, c in enumerate(prev):
            nxt[i] -= t2[k - 2] * c
        prev, curr = curr, nxt
    return list(reversed(curr))


def charpoly_roots(spec: TruncationSpec, dps: int = 60) -> np.ndarray:
    """Eigenvalues as high-precision roots of the exact characteristic polynomial"""
    coefficients = charpoly_coefficients(spec)
    with mpmath.workdps(dps):
        mp_coefficients = [mpmath.mpf(c.numerator) / c.denominator for c in coefficients]
        roots = mpmath.polyroots(mp_coefficients, maxsteps=400, extraprec=4 * dps)
        real = sorted(float(mpmath.re(r)) for r in roots)
    return np.array(real)
