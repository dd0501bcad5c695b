"""
Truncated Generalized-Squeezing Hamiltonians
Builds the real symmetric tridiagonal (Jacobi) form of i[(a^dag)^n - a^n] (+ Kerr)
restricted to the invariant subspace {|0>, |n>, ..., |n(N-1)>}
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..exceptions import SpecError

logger = logging.getLogger(__name__)

KERR_ORDERS = (2, 4)
GAUGE_NOTE = "H_phys = D T D^dag with D = diag(i^j); vacuum and photon number are gauge invariant"

# Largest argument for which factorial ratios stay exact in double precision
_EXACT_PRODUCT_LIMIT = 170


@dataclass(frozen=True)
class KerrSpec:
    """Kerr term K (a^dag)^h a^h; for h=4 the strength is K_4 and 1/4! is applied internally"""
    order: int
    strength: float

    def __post_init__(self):
        if self.order not in KERR_ORDERS:
            raise SpecError(f"Kerr order must be one of {KERR_ORDERS}, got {self.order}")
        if not self.strength >= 0:
            raise SpecError(f"Kerr strength must be >= 0, got {self.strength}")

    @property
    def coefficient(self) -> float:
        """Strength with its conventional factor (K, or K_4/4!)"""
        return self.strength / math.factorial(self.order) if self.order == 4 else self.strength

    def with_strength(self, strength: float) -> "KerrSpec":
        return KerrSpec(self.order, strength)


@dataclass(frozen=True)
class TruncationSpec:
    """Model parameters of one truncated Hamiltonian"""
    n: int
    dim: int
    kerr: Optional[KerrSpec] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise SpecError(f"squeezing order n must be an integer >= 1, got {self.n}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise SpecError(f"dimension must be an integer >= 1, got {self.dim}")

    @property
    def photon_numbers(self) -> np.ndarray:
        """Physical photon numbers m_j = n*j covered by the basis"""
        return self.n * np.arange(self.dim, dtype=float)

    @property
    def max_photon_number(self) -> int:
        return self.n * (self.dim - 1)

    def with_dim(self, dim: int) -> "TruncationSpec":
        return TruncationSpec(self.n, dim, self.kerr)

    def with_kerr(self, kerr: Optional[KerrSpec]) -> "TruncationSpec":
        return TruncationSpec(self.n, self.dim, kerr)

    def label(self) -> str:
        kerr = "" if self.kerr is None else f"_h{self.kerr.order}_K{self.kerr.strength:g}"
        return f"n{self.n}_N{self.dim}{kerr}"


@dataclass(frozen=True)
class JacobiMatrix:
    """Gauged truncated Hamiltonian: real diagonal d_j and positive couplings t_j"""
    diag: np.ndarray
    offdiag: np.ndarray
    gauge_note: str = field(default=GAUGE_NOTE, compare=False)

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def has_kerr(self) -> bool:
        return bool(np.any(self.diag != 0.0))

    def gershgorin_bound(self) -> float:
        """max|d| + 2 max t, an upper bound on the spectral radius"""
        top = float(np.max(np.abs(self.diag))) if self.dim else 0.0
        if self.dim > 1:
            top += 2.0 * float(np.max(self.offdiag))
        return top

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """T @ v without forming the matrix"""
        out = self.diag * v
        if self.dim > 1:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def ladder_couplings(n: int, count: int) -> np.ndarray:
    """t_j = sqrt((nj+n)!/(nj)!) for j = 0..count-1"""
    if count <= 0:
        return np.zeros(0)
    j = np.arange(count, dtype=np.int64)
    factors = n * j[:, None] + np.arange(1, n + 1, dtype=np.int64)[None, :]
    logs = 0.5 * np.log(factors.astype(float)).sum(axis=1)
    t = np.exp(logs)

    # Direct products are exact to rounding while the largest factor stays small
    exact = factors[:, -1] <= _EXACT_PRODUCT_LIMIT
    if np.any(exact):
        with np.errstate(over="ignore"):
            products = np.prod(factors[exact].astype(float), axis=1)
        finite = np.isfinite(products)
        t_exact = t[exact]
        t_exact[finite] = np.sqrt(products[finite])
        t[exact] = t_exact
    return t


def kerr_diagonal(m: int, kerr: Optional[KerrSpec]) -> float:
    """Kerr energy of Fock state |m>: coefficient times the falling factorial m(m-1)...(m-h+1)"""
    if m < 0:
        raise SpecError(f"photon number must be >= 0, got {m}")
    if kerr is None:
        return 0.0
    falling = 1.0
    for k in range(kerr.order):
        falling *= (m - k)
    return kerr.coefficient * max(falling, 0.0)


def kerr_diagonals(photon_numbers: np.ndarray, kerr: Optional[KerrSpec]) -> np.ndarray:
    """Vectorized kerr_diagonal"""
    m = np.asarray(photon_numbers, dtype=float)
    if kerr is None:
        return np.zeros_like(m)
    falling = np.ones_like(m)
    for k in range(kerr.order):
        falling *= (m - k)
    return kerr.coefficient * np.clip(falling, 0.0, None)


def build_hamiltonian(spec: TruncationSpec) -> JacobiMatrix:
    """Jacobi form of P_N H_n P_N (+ Kerr) on the vacuum's invariant subspace"""
    offdiag = ladder_couplings(spec.n, spec.dim - 1)
    diag = kerr_diagonals(spec.photon_numbers, spec.kerr)
    diag.setflags(write=False)
    offdiag.setflags(write=False)
    logger.debug("built %s (max coupling %.3e)", spec.label(), offdiag.max() if len(offdiag) else 0.0)
    return JacobiMatrix(diag=diag, offdiag=offdiag)


def gauge_vector(dim: int) -> np.ndarray:
    """Diagonal of D = diag(i^j)"""
    return 1j ** (np.arange(dim) % 4)


def physical_matrix(H: JacobiMatrix) -> np.ndarray:
    """Dense physical Hamiltonian: <j+1|H|j> = i t_j, <j|H|j+1> = -i t_j"""
    return np.diag(H.diag).astype(complex) + np.diag(-1j * H.offdiag, 1) + np.diag(1j * H.offdiag, -1)


def dominance_ratio(spec: TruncationSpec) -> float:
    """Kerr diagonal over squeezing off-diagonal at the truncation edge, operators -> sqrt(nN)"""
    if spec.kerr is None:
        raise SpecError("dominance_ratio requires a Kerr term")
    if spec.kerr.strength == 0:
        return 0.0
    x = math.log(spec.n * spec.dim)
    h = spec.kerr.order
    return math.exp(math.log(spec.kerr.coefficient) + h * x - 0.5 * spec.n * x)


def kerr_threshold(n: int, order: int, dim: int) -> float:
    """Strength at which dominance_ratio equals 1"""
    probe = TruncationSpec(n, dim, KerrSpec(order, 1.0))
    return 1.0 / dominance_ratio(probe)
