"""
Experiments
Parity comparisons, truncation-size convergence, Kerr-strength sweeps and
threshold detection built from batches of vacuum propagations
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import AppConfig
from ..core.operators import KerrSpec, TruncationSpec, dominance_ratio, kerr_threshold
from ..core.propagate import PropagationConfig, Trajectory
from ..core.sa_probe import critical_strength
from ..exceptions import NoFlipError, RegulationError, SpecError
from .batch_operations import BatchOperationManager, ProgressCallback
from .comparison import (
    OscillationStats,
    OscillationTrend,
    agreement_horizon,
    agreement_tolerance,
    oscillation_stats,
    oscillation_trend,
    pairwise_distances,
    sup_distance,
)

logger = logging.getLogger(__name__)

MIN_PARITY_N = 100


def _pair_key(pair: Tuple[int, int]) -> str:
    return f"{pair[0]}-{pair[1]}"


def _grid(r_max: Optional[float], config: AppConfig) -> PropagationConfig:
    return PropagationConfig(r_max=config.r_max if r_max is None else r_max, dr=config.dr,
                             method=config.method)


def _manager(config: AppConfig) -> BatchOperationManager:
    return BatchOperationManager(jobs=config.jobs)


@dataclass
class ParityReport:
    """Even/odd truncation comparison at a small and a large size"""
    n: int
    dims: Tuple[int, int, int, int]
    max_photon: Dict[int, float]
    pair_distance: Dict[str, float]
    kerr: Optional[KerrSpec] = None
    trajectories: Dict[int, Trajectory] = field(default_factory=dict, repr=False)

    @property
    def even_dims(self) -> Tuple[int, int]:
        return self.dims[0], self.dims[2]

    @property
    def odd_dims(self) -> Tuple[int, int]:
        return self.dims[1], self.dims[3]

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "dims": list(self.dims),
            "kerr": None if self.kerr is None else {"order": self.kerr.order,
                                                    "strength": self.kerr.strength},
            "max_photon": {str(d): v for d, v in self.max_photon.items()},
            "pair_distance": dict(self.pair_distance),
        }


@dataclass
class SweepReport:
    """Trajectories and cross-dim distances over Kerr strengths"""
    n: int
    kerr_order: int
    strengths: List[float]
    dims: List[int]
    trajectories: Dict[Tuple[float, int], Trajectory] = field(repr=False)
    distances: Dict[float, Dict[str, float]]
    tolerances: Dict[float, float]
    regulated: Dict[float, bool]
    dominance: Dict[Tuple[float, int], float]
    horizons: Dict[float, float] = field(default_factory=dict)
    oscillations: Dict[float, OscillationStats] = field(default_factory=dict)
    trend: Optional[OscillationTrend] = None

    def spec_base(self) -> TruncationSpec:
        """Spec without Kerr strength, at the smallest dim"""
        return TruncationSpec(self.n, min(self.dims), KerrSpec(self.kerr_order, 0.0))

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "kerr_order": self.kerr_order,
            "strengths": list(self.strengths),
            "dims": list(self.dims),
            "distances": {repr(k): v for k, v in self.distances.items()},
            "tolerances": {repr(k): v for k, v in self.tolerances.items()},
            "regulated": {repr(k): v for k, v in self.regulated.items()},
            "dominance_ratio": {f"{k!r}@{d}": v for (k, d), v in self.dominance.items()},
            "agreement_horizon": {repr(k): v for k, v in self.horizons.items()},
            "oscillations": {repr(k): {"amplitude": s.amplitude, "period": s.period,
                                       "peak_count": s.peak_count}
                             for k, s in self.oscillations.items()},
            "trend": self.trend.to_dict() if self.trend is not None else None,
        }


@dataclass(frozen=True)
class ThresholdEstimate:
    """Detected regulation threshold next to the analytic dominance estimate"""
    value: float
    bracket: Tuple[float, float]
    analytic: float
    critical: Optional[float]
    verdicts: Dict[float, bool]

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> Dict:
        return {
            "threshold": self.value,
            "bracket": list(self.bracket),
            "analytic_estimate": self.analytic,
            "critical_strength": self.critical,
            "verdicts": {repr(k): v for k, v in self.verdicts.items()},
        }


@dataclass(frozen=True)
class ConvergenceReport:
    """Maximum photon number over truncation sizes of one parity"""
    n: int
    dims: Tuple[int, ...]
    max_photon: Dict[int, float]
    distances: Dict[str, float]

    def growth(self) -> float:
        """max_photon at the largest dim over max_photon at the smallest"""
        first, last = self.max_photon[self.dims[0]], self.max_photon[self.dims[-1]]
        return last / first if first > 0 else float("inf")

    def to_dict(self) -> Dict:
        return {"n": self.n, "dims": list(self.dims),
                "max_photon": {str(d): v for d, v in self.max_photon.items()},
                "distances": dict(self.distances), "growth": self.growth()}


@dataclass(frozen=True)
class CriticalPointReport:
    """Within-pair and across-size distances at the n = 2h balance point"""
    n: int
    kerr: KerrSpec
    dims: Tuple[int, int, int, int]
    within_pair: Dict[str, float]
    across_size: Dict[str, float]
    max_photon: Dict[int, float]

    def to_dict(self) -> Dict:
        return {"n": self.n, "kerr": {"order": self.kerr.order, "strength": self.kerr.strength},
                "dims": list(self.dims), "within_pair": dict(self.within_pair),
                "across_size": dict(self.across_size),
                "max_photon": {str(d): v for d, v in self.max_photon.items()}}


def parity_dims(N: int, full: bool = False, config: Optional[AppConfig] = None
                ) -> Tuple[int, int, int, int]:
    """(N, N+1, L, L+1) with L = 4N at desk scale or 10N with full"""
    config = config or AppConfig()
    large = (config.full_large_factor if full else config.desk_large_factor) * N
    return N, N + 1, large, large + 1


def parity_experiment(n: int, N: int, r_max: Optional[float] = None,
                      kerr: Optional[KerrSpec] = None, full: bool = False,
                      config: Optional[AppConfig] = None,
                      progress_callback: Optional[ProgressCallback] = None) -> ParityReport:
    """Propagate at (N, N+1, L, L+1) and measure even-even, odd-odd and even-odd distances"""
    config = config or AppConfig()
    if N % 2 or N < MIN_PARITY_N:
        raise SpecError(f"parity experiment needs an even N >= {MIN_PARITY_N}, got {N}")
    dims = parity_dims(N, full, config)
    specs = [TruncationSpec(n, d, kerr) for d in dims]
    results = _manager(config).batch_propagate(specs, _grid(r_max, config), config,
                                               progress_callback)
    trajectories = {dim: t for (_, dim), t in results.items()}

    even_small, odd_small, even_large, odd_large = dims
    pair_distance = {
        "even_even": sup_distance(trajectories[even_small], trajectories[even_large]),
        "odd_odd": sup_distance(trajectories[odd_small], trajectories[odd_large]),
        "even_odd": sup_distance(trajectories[even_small], trajectories[odd_small]),
        "even_odd_large": sup_distance(trajectories[even_large], trajectories[odd_large]),
    }
    max_photon = {d: trajectories[d].max_photon for d in dims}
    logger.info("parity n=%d N=%d: %s", n, N,
                ", ".join(f"{k}={v:.4g}" for k, v in pair_distance.items()))
    return ParityReport(n, dims, max_photon, pair_distance, kerr, trajectories)


def convergence_experiment(n: int, dims: Sequence[int], r_max: Optional[float] = None,
                           kerr: Optional[KerrSpec] = None,
                           config: Optional[AppConfig] = None) -> ConvergenceReport:
    """Maximum photon number along one parity track of increasing truncation size"""
    config = config or AppConfig()
    dims = tuple(sorted(int(d) for d in dims))
    if len({d % 2 for d in dims}) != 1:
        raise SpecError(f"convergence track needs dims of one parity, got {dims}")
    specs = [TruncationSpec(n, d, kerr) for d in dims]
    results = _manager(config).batch_propagate(specs, _grid(r_max, config), config)
    trajectories = {dim: t for (_, dim), t in results.items()}
    distances = {_pair_key(p): v for p, v in pairwise_distances(trajectories).items()}
    return ConvergenceReport(n, dims, {d: trajectories[d].max_photon for d in dims}, distances)


def _check_adjacent_pair(dims: Sequence[int]):
    if not any(d + 1 in dims for d in dims):
        raise SpecError(f"dims must include an adjacent even/odd pair, got {sorted(dims)}")


def _sweep(n: int, kerr_order: int, strengths: Sequence[float], dims: Sequence[int],
           r_max: Optional[float], config: AppConfig,
           progress_callback: Optional[ProgressCallback]) -> SweepReport:
    strengths = [float(k) for k in strengths]
    if any(b <= a for a, b in zip(strengths, strengths[1:])):
        raise SpecError(f"strengths must be strictly increasing, got {strengths}")
    dims = sorted(int(d) for d in dims)
    specs = [TruncationSpec(n, d, KerrSpec(kerr_order, k)) for k in strengths for d in dims]
    trajectories = _manager(config).batch_propagate(specs, _grid(r_max, config), config,
                                                    progress_callback)

    distances, tolerances, regulated, horizons, oscillations = {}, {}, {}, {}, {}
    dominance = {(spec.kerr.strength, spec.dim): dominance_ratio(spec) for spec in specs}
    for k in strengths:
        per_dim = {d: trajectories[(k, d)] for d in dims}
        tol = agreement_tolerance(per_dim.values(), config)
        pairs = pairwise_distances(per_dim)
        distances[k] = {_pair_key(p): v for p, v in pairs.items()}
        tolerances[k] = tol
        regulated[k] = all(v < tol for v in pairs.values())
        horizons[k] = min((agreement_horizon(per_dim[a], per_dim[b], tol) for a, b in pairs),
                          default=float(per_dim[dims[0]].r_grid[-1]))
        oscillations[k] = oscillation_stats(per_dim[dims[0]])
        logger.info("n=%d h=%d K=%g: %s (worst distance %.3g, tolerance %.3g)", n, kerr_order, k,
                    "regulated" if regulated[k] else "not regulated",
                    max(pairs.values(), default=0.0), tol)
    return SweepReport(n, kerr_order, strengths, dims, trajectories, distances, tolerances,
                       regulated, dominance, horizons, oscillations)


def kerr_sweep(n: int, kerr_order: int, strengths: Sequence[float], dims: Sequence[int],
               r_max: Optional[float] = None, config: Optional[AppConfig] = None,
               progress_callback: Optional[ProgressCallback] = None) -> SweepReport:
    """
    Propagate every (strength, dim) and flag strengths whose trajectories agree

    A strength is regulated when all cross-dim sup distances stay below
    max(rel_tol * max_photon, abs_floor).
    """
    config = config or AppConfig()
    _check_adjacent_pair([int(d) for d in dims])
    return _sweep(n, kerr_order, strengths, dims, r_max, config, progress_callback)


def threshold_detect(report: SweepReport) -> ThresholdEstimate:
    """
    Midpoint of the (unregulated, regulated) pair after which every strength is regulated

    One unregulated strength above a regulated one (non-monotone verdicts near the
    critical point) moves the bracket up to the last flip.
    """
    verdicts = {k: report.regulated[k] for k in report.strengths}
    strengths = report.strengths
    first_stable = None
    for i in range(len(strengths) - 1, -1, -1):
        if not verdicts[strengths[i]]:
            break
        first_stable = i
    if first_stable is None or first_stable == 0:
        raise NoFlipError(verdicts)
    lo, hi = strengths[first_stable - 1], strengths[first_stable]
    analytic = kerr_threshold(report.n, report.kerr_order, min(report.dims))
    critical = critical_strength(report.kerr_order) if report.n == 2 * report.kerr_order else None
    estimate = ThresholdEstimate(0.5 * (lo + hi), (lo, hi), analytic, critical, verdicts)
    logger.info("threshold n=%d h=%d: %.4g in (%g, %g); dominance estimate %.4g", report.n,
                report.kerr_order, estimate.value, lo, hi, analytic)
    return estimate


def variable_k_panel(n: int, kerr_order: int, strengths: Sequence[float], dim: int = 1000,
                     r_max: Optional[float] = None, config: Optional[AppConfig] = None,
                     progress_callback: Optional[ProgressCallback] = None) -> SweepReport:
    """Trajectories at fixed dim for regulated strengths, spot-checked against dim+1"""
    config = config or AppConfig()
    report = _sweep(n, kerr_order, strengths, [dim, dim + 1], r_max, config, progress_callback)
    for k in report.strengths:
        if not report.regulated[k]:
            worst = max(report.distances[k].values())
            raise RegulationError(k, worst, report.tolerances[k])
    report.trend = oscillation_trend(report.strengths,
                                     [report.oscillations[k] for k in report.strengths])
    if not report.trend.amplitude_falling:
        logger.warning("n=%d h=%d: amplitude rises with K at %s", n, kerr_order,
                       list(report.trend.amplitude_exceptions))
    if not report.trend.period_falling:
        logger.warning("n=%d h=%d: period rises with K at %s", n, kerr_order,
                       list(report.trend.period_exceptions))
    return report


def critical_point_report(n: int = 4, kerr_order: int = 2, strength: Optional[float] = None,
                          N: int = 1000, r_max: Optional[float] = None, full: bool = False,
                          config: Optional[AppConfig] = None) -> CriticalPointReport:
    """Compare parities within a size pair and sizes within a parity at K = K_critical"""
    config = config or AppConfig()
    kerr = KerrSpec(kerr_order, critical_strength(kerr_order) if strength is None else strength)
    if n != 2 * kerr_order:
        raise SpecError(f"critical point needs n = 2h, got n={n}, h={kerr_order}")
    report = parity_experiment(n, N, r_max, kerr, full, config)
    t = report.trajectories
    small, small_odd, large, large_odd = report.dims
    within = {_pair_key((small, small_odd)): sup_distance(t[small], t[small_odd]),
              _pair_key((large, large_odd)): sup_distance(t[large], t[large_odd])}
    across = {_pair_key((small, large)): sup_distance(t[small], t[large]),
              _pair_key((small_odd, large_odd)): sup_distance(t[small_odd], t[large_odd])}
    return CriticalPointReport(n, kerr, report.dims, within, across, report.max_photon)


def regulation_calibration(report: SweepReport) -> Dict[float, float]:
    """dominance_ratio at the smallest dim for every regulated strength"""
    smallest = min(report.dims)
    return {k: report.dominance[(k, smallest)] for k in report.strengths if report.regulated[k]}


def max_photon_table(report: SweepReport) -> np.ndarray:
    """(strength, dim) grid of maximum photon numbers"""
    return np.array([[report.trajectories[(k, d)].max_photon for d in report.dims]
                     for k in report.strengths])
