"""
Vacuum Propagation
Evolves |0> under a truncated Hamiltonian on the grid r_k = k*dr and records the
average photon number <a^dag a>(r)
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence, Union

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import eigh_tridiagonal, expm
from scipy.special import jv

from ..config import AppConfig
from ..exceptions import (
    ChebyshevConvergenceError,
    MethodRefusedError,
    NormalizationError,
    PropagationError,
    SpecError,
    SpectrumConvergenceError,
)
from .operators import (
    JacobiMatrix,
    TruncationSpec,
    build_hamiltonian,
    gauge_vector,
    physical_matrix,
)

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-6
BESSEL_TAIL = 1e-15

# Grid points per dense block when reconstructing states from eigenvectors
_SPECTRAL_CHUNK = 32


class PropagationMethod(Enum):
    """How e^{-iTr} e_0 is evaluated"""
    SPECTRAL = "spectral"
    CHEBYSHEV = "chebyshev"
    POWERING = "powering"
    AUTO = "auto"


@dataclass(frozen=True)
class PropagationConfig:
    """Squeezing-parameter grid and evaluation method"""
    r_max: float = 2.0
    dr: float = 0.01
    method: PropagationMethod = PropagationMethod.AUTO
    record_states: bool = False

    def __post_init__(self):
        if isinstance(self.method, str):
            try:
                object.__setattr__(self, "method", PropagationMethod(self.method))
            except ValueError as e:
                raise SpecError(f"unknown propagation method '{self.method}'") from e
        if not (self.r_max > 0 and self.dr > 0):
            raise SpecError(f"r_max and dr must be positive, got {self.r_max}, {self.dr}")
        if self.method == PropagationMethod.POWERING:
            ratio = self.r_max / self.dr
            if abs(ratio - round(ratio)) > 0.5 * math.ulp(ratio):
                raise SpecError(
                    f"powering needs r_max to be an integer multiple of dr "
                    f"(r_max/dr = {ratio!r})"
                )

    @classmethod
    def from_app_config(cls, config: AppConfig, record_states: bool = False) -> "PropagationConfig":
        return cls(r_max=config.r_max, dr=config.dr, method=config.method,
                   record_states=record_states)

    @property
    def steps(self) -> int:
        ratio = self.r_max / self.dr
        nearest = round(ratio)
        if math.isclose(ratio, nearest, rel_tol=1e-12, abs_tol=1e-12):
            return int(nearest)
        return int(math.floor(ratio))

    def grid(self) -> np.ndarray:
        """r_k = k * dr for integer k"""
        return np.arange(self.steps + 1, dtype=float) * self.dr


@dataclass
class Trajectory:
    """Photon number and norm drift of the propagated vacuum on an r-grid"""
    r_grid: np.ndarray
    photon_number: np.ndarray
    norm_drift: np.ndarray
    states: Optional[np.ndarray] = None
    method: str = ""
    label: str = field(default="", compare=False)

    def __len__(self) -> int:
        return len(self.r_grid)

    @property
    def max_photon(self) -> float:
        return float(np.max(self.photon_number)) if len(self) else 0.0

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(self.norm_drift)) if len(self) else 0.0

    @classmethod
    def empty(cls) -> "Trajectory":
        return cls(np.zeros(0), np.zeros(0), np.zeros(0))


def photon_number(state: np.ndarray, n: int) -> float:
    """<psi| a^dag a |psi> = sum_j n j |psi_j|^2 in the invariant-subspace basis"""
    state = np.asarray(state)
    probabilities = np.abs(state) ** 2
    deviation = abs(math.sqrt(float(probabilities.sum())) - 1.0)
    if deviation > NORM_TOLERANCE:
        raise NormalizationError(f"state norm deviates from 1 by {deviation:.3g}")
    return float(n * np.dot(np.arange(len(state)), probabilities))


def _photon_numbers(states: np.ndarray, n: int) -> np.ndarray:
    """Photon number for each row of a (grid, dim) block"""
    weights = n * np.arange(states.shape[1], dtype=float)
    return (np.abs(states) ** 2) @ weights


def _norm_drifts(states: np.ndarray) -> np.ndarray:
    return np.abs(np.linalg.norm(states, axis=1) - 1.0)


def _vacuum(dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    return psi


def chebyshev_bound(H: JacobiMatrix, margin: float = 0.05) -> float:
    """Half-width of the interval [-b, b] enclosing the spectrum"""
    return H.gershgorin_bound() * (1.0 + margin)


def chebyshev_terms(H: JacobiMatrix, dr: float, margin: float = 0.05) -> int:
    """Series length after which the Bessel coefficients J_k(b*dr) drop below 1e-15"""
    x = chebyshev_bound(H, margin) * abs(dr)
    if x == 0.0:
        return 1
    # J_k(x) is O(x^-1/2) for k < x and decays super-exponentially once k
    # exceeds x by a few x^(1/3), so only that transition band is scanned
    floor = int(math.floor(x))
    ceiling = int(math.ceil(x + 12.0 * x ** (1.0 / 3.0) + 40))
    k = np.arange(floor, ceiling + 1)
    above = np.flatnonzero(np.abs(jv(k, x)) > BESSEL_TAIL)
    return floor + int(above[-1]) + 2 if len(above) else floor + 1


def _chebyshev_coefficients(x: float, terms: int) -> np.ndarray:
    """c_k = (2 - delta_k0) (-i)^k J_k(x) for e^{-i x s}, s in [-1, 1]"""
    k = np.arange(terms)
    coefficients = ((-1j) ** (k % 4)) * jv(k, x)
    coefficients[1:] *= 2.0
    return coefficients


def _chebyshev_step(H: JacobiMatrix, psi: np.ndarray, bound: float,
                    coefficients: np.ndarray) -> np.ndarray:
    """Apply sum_k c_k T_k(H/b) to psi with the three-term recurrence"""
    scaled = JacobiMatrix(H.diag / bound, H.offdiag / bound)
    previous = psi
    out = coefficients[0] * previous
    if len(coefficients) == 1:
        return out
    current = scaled.matvec(psi)
    out = out + coefficients[1] * current
    for c in coefficients[2:]:
        previous, current = current, 2.0 * scaled.matvec(current) - previous
        out += c * current
    return out


def _spectral_blocks(H: JacobiMatrix, r_values: np.ndarray) -> Iterator[np.ndarray]:
    """Yield (chunk, dim) state blocks psi(r) = Q e^{-i Lambda r} Q^T e_0"""
    if H.dim == 1:
        for r in r_values:
            yield np.exp(-1j * H.diag[0] * np.array([[r]]))
        return
    try:
        eigenvalues, Q = eigh_tridiagonal(np.asarray(H.diag, float), np.asarray(H.offdiag, float),
                                          check_finite=False)
    except LinAlgError as e:
        raise SpectrumConvergenceError(-1, f"({e})") from e
    overlaps = Q[0, :]
    for start in range(0, len(r_values), _SPECTRAL_CHUNK):
        r = r_values[start:start + _SPECTRAL_CHUNK]
        phases = np.exp(-1j * np.outer(eigenvalues, r)) * overlaps[:, None]
        yield (Q @ phases).T


def spectral_states(H: JacobiMatrix, r_values: Sequence[float]) -> np.ndarray:
    """States e^{-iTr} e_0 for arbitrary (also negative) r, shape (len(r), dim)"""
    r_values = np.asarray(r_values, dtype=float)
    blocks = list(_spectral_blocks(H, r_values))
    return np.vstack(blocks) if blocks else np.zeros((0, H.dim), dtype=complex)


def dense_oracle(H: JacobiMatrix, r_values: Sequence[float]) -> np.ndarray:
    """
    Brute-force reference: expm of the physical (un-gauged) matrix

    Returned states are mapped back to the real gauge, so they compare directly
    with the other methods.
    """
    physical = physical_matrix(H)
    conj_gauge = np.conj(gauge_vector(H.dim))
    vacuum = _vacuum(H.dim)
    return np.array([conj_gauge * (expm(-1j * r * physical) @ vacuum) for r in r_values])


def _run_spectral(H: JacobiMatrix, spec: TruncationSpec, r_grid: np.ndarray, record: bool):
    photon, drift, states = [], [], []
    for block in _spectral_blocks(H, r_grid):
        photon.append(_photon_numbers(block, spec.n))
        drift.append(_norm_drifts(block))
        if record:
            states.append(block)
    return np.concatenate(photon), np.concatenate(drift), np.vstack(states) if record else None


def _run_stepper(step, spec: TruncationSpec, r_grid: np.ndarray, record: bool):
    psi = _vacuum(spec.dim)
    photon = np.empty(len(r_grid))
    drift = np.empty(len(r_grid))
    states = np.empty((len(r_grid), spec.dim), dtype=complex) if record else None
    for k in range(len(r_grid)):
        if k:
            psi = step(psi)
        photon[k] = spec.n * np.dot(np.arange(spec.dim), np.abs(psi) ** 2)
        drift[k] = abs(np.linalg.norm(psi) - 1.0)
        if record:
            states[k] = psi
    return photon, drift, states


def _run_chebyshev(H: JacobiMatrix, spec: TruncationSpec, cfg: PropagationConfig,
                   config: AppConfig, r_grid: np.ndarray):
    terms = chebyshev_terms(H, cfg.dr, config.chebyshev_margin)
    if terms > config.chebyshev_max_terms:
        raise ChebyshevConvergenceError(terms, config.chebyshev_max_terms, cfg.dr)
    bound = chebyshev_bound(H, config.chebyshev_margin)
    coefficients = _chebyshev_coefficients(bound * cfg.dr, terms)
    logger.debug("chebyshev %s: %d terms per step, bound %.3e", spec.label(), terms, bound)
    return _run_stepper(lambda psi: _chebyshev_step(H, psi, bound, coefficients),
                        spec, r_grid, cfg.record_states)


def _run_powering(H: JacobiMatrix, spec: TruncationSpec, cfg: PropagationConfig,
                  config: AppConfig, r_grid: np.ndarray):
    if spec.dim > config.powering_max_dim:
        raise MethodRefusedError(
            f"powering builds a dense {spec.dim}x{spec.dim} propagator; refused above "
            f"dim={config.powering_max_dim}, use --method spectral or chebyshev"
        )
    step = expm(-1j * cfg.dr * H.to_dense())
    return _run_stepper(lambda psi: step @ psi, spec, r_grid, cfg.record_states)


def resolve_method(H: JacobiMatrix, cfg: PropagationConfig,
                   config: Optional[AppConfig] = None) -> PropagationMethod:
    """Concrete method for AUTO: spectral up to the size limit, Chebyshev above when feasible"""
    config = config or AppConfig()
    if cfg.method != PropagationMethod.AUTO:
        return cfg.method
    if H.dim <= config.auto_spectral_max_dim:
        return PropagationMethod.SPECTRAL
    terms = chebyshev_terms(H, cfg.dr, config.chebyshev_margin)
    if terms > config.chebyshev_max_terms:
        logger.warning("auto: chebyshev needs %d terms per step at dim=%d, using spectral",
                       terms, H.dim)
        return PropagationMethod.SPECTRAL
    return PropagationMethod.CHEBYSHEV


def propagate_vacuum(H: JacobiMatrix, spec: TruncationSpec, cfg: PropagationConfig,
                     config: Optional[AppConfig] = None) -> Trajectory:
    """
    Evolve the vacuum on the grid r_k = k*dr

    Args:
        H: Jacobi matrix built from spec
        spec: truncation parameters (n sets the photon-number weights)
        cfg: grid and method
        config: size limits and Chebyshev settings

    Returns:
        Trajectory with photon number and norm drift per grid point
    """
    config = config or AppConfig()
    if H.dim != spec.dim:
        raise SpecError(f"matrix dimension {H.dim} does not match spec dimension {spec.dim}")
    r_grid = cfg.grid()
    method = resolve_method(H, cfg, config)
    logger.info("propagating %s with %s over %d grid points", spec.label(), method.value, len(r_grid))

    if method == PropagationMethod.SPECTRAL:
        photon, drift, states = _run_spectral(H, spec, r_grid, cfg.record_states)
    elif method == PropagationMethod.CHEBYSHEV:
        photon, drift, states = _run_chebyshev(H, spec, cfg, config, r_grid)
    else:
        photon, drift, states = _run_powering(H, spec, cfg, config, r_grid)

    if r_grid[0] == 0.0:
        photon[0] = 0.0  # identity evolution
    return Trajectory(r_grid, photon, drift, states, method.value, label=spec.label())


def propagate_spec(spec: TruncationSpec, cfg: PropagationConfig,
                   config: Optional[AppConfig] = None) -> Trajectory:
    """Build the Hamiltonian and propagate, wrapping failures with dim context"""
    try:
        return propagate_vacuum(build_hamiltonian(spec), spec, cfg, config)
    except (ChebyshevConvergenceError, MethodRefusedError, SpectrumConvergenceError,
            MemoryError) as e:
        raise PropagationError(spec.dim, e) from e


def photon_number_at(H: JacobiMatrix, n: int, r_values: Union[float, Sequence[float]]) -> np.ndarray:
    """Photon number at arbitrary r (negative allowed) via the eigendecomposition"""
    states = spectral_states(H, np.atleast_1d(np.asarray(r_values, dtype=float)))
    return _photon_numbers(states, n)
