"""
Trajectory Comparison
Compare photon-number trajectories on a common r-grid and summarize differences
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import find_peaks

from ..config import AppConfig
from ..core.propagate import Trajectory
from ..exceptions import SqueezeLabError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrajectoryDiff:
    """Differences between two trajectories"""
    label_a: str
    label_b: str
    sup_distance: float
    argmax_r: float
    horizon: float
    tolerance: float

    @property
    def agrees(self) -> bool:
        return self.sup_distance < self.tolerance


@dataclass(frozen=True)
class OscillationStats:
    """Mean peak height and peak spacing of a photon-number trajectory"""
    amplitude: float
    period: float
    peak_count: int


@dataclass(frozen=True)
class OscillationTrend:
    """
    How oscillation amplitude and period move as the Kerr strength grows

    An exception is a strength at which the value rose over the previous one.
    """
    strengths: Tuple[float, ...]
    amplitudes: Tuple[float, ...]
    periods: Tuple[float, ...]
    amplitude_exceptions: Tuple[float, ...]
    period_exceptions: Tuple[float, ...]

    @property
    def amplitude_falling(self) -> bool:
        return not self.amplitude_exceptions

    @property
    def period_falling(self) -> bool:
        return not self.period_exceptions

    def to_dict(self) -> Dict:
        return {
            "strengths": list(self.strengths),
            "amplitudes": list(self.amplitudes),
            "periods": [p if np.isfinite(p) else None for p in self.periods],
            "amplitude_falling": self.amplitude_falling,
            "period_falling": self.period_falling,
            "amplitude_exceptions": list(self.amplitude_exceptions),
            "period_exceptions": list(self.period_exceptions),
        }


def _common(a: Trajectory, b: Trajectory) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Photon numbers of both trajectories on their shared grid prefix"""
    count = min(len(a), len(b))
    if not np.allclose(a.r_grid[:count], b.r_grid[:count], rtol=0, atol=1e-12):
        raise SqueezeLabError(f"trajectories {a.label} and {b.label} use different r-grids")
    return a.r_grid[:count], a.photon_number[:count], b.photon_number[:count]


def sup_distance(a: Trajectory, b: Trajectory) -> float:
    """max_k |<n>_a(r_k) - <n>_b(r_k)| over the common grid"""
    _, pa, pb = _common(a, b)
    return float(np.max(np.abs(pa - pb))) if len(pa) else 0.0


def agreement_tolerance(trajectories: Sequence[Trajectory],
                        config: Optional[AppConfig] = None) -> float:
    """Relative tolerance on the largest photon number, with an absolute floor"""
    config = config or AppConfig()
    top = max((t.max_photon for t in trajectories), default=0.0)
    return max(config.agreement_rel_tol * top, config.agreement_abs_floor)


def agreement_horizon(a: Trajectory, b: Trajectory, tol: float) -> float:
    """Largest r up to which the two trajectories stay within tol of each other"""
    r, pa, pb = _common(a, b)
    if len(r) == 0:
        return 0.0
    outside = np.flatnonzero(np.abs(pa - pb) > tol)
    if len(outside) == 0:
        return float(r[-1])
    first = outside[0]
    return float(r[first - 1]) if first > 0 else 0.0


def oscillation_stats(t: Trajectory) -> OscillationStats:
    """
    Amplitude and period from the local maxima of <n>(r)

    With two or more peaks the period is their mean spacing. With a single peak
    it is twice the peak position, since the vacuum starts at a minimum.
    """
    peaks, _ = find_peaks(t.photon_number)
    if len(peaks) == 0:
        return OscillationStats(t.max_photon, float("inf"), 0)
    heights = t.photon_number[peaks]
    positions = t.r_grid[peaks]
    if len(peaks) == 1:
        period = 2.0 * float(positions[0])
    else:
        period = float(np.mean(np.diff(positions)))
    return OscillationStats(float(np.mean(heights)), period, len(peaks))


def _rises(strengths: Sequence[float], values: Sequence[float]) -> Tuple[float, ...]:
    return tuple(float(strengths[i]) for i in range(1, len(values)) if values[i] > values[i - 1])


def oscillation_trend(strengths: Sequence[float],
                      stats: Sequence[OscillationStats]) -> OscillationTrend:
    """Amplitude and period per strength, in ascending strength order"""
    order = np.argsort(np.asarray(strengths, dtype=float), kind="stable")
    ks = [float(strengths[i]) for i in order]
    amplitudes = [stats[i].amplitude for i in order]
    periods = [stats[i].period for i in order]
    return OscillationTrend(tuple(ks), tuple(amplitudes), tuple(periods),
                            _rises(ks, amplitudes), _rises(ks, periods))


class TrajectoryComparator:
    """Compares two trajectories"""

    def __init__(self, a: Trajectory, b: Trajectory, config: Optional[AppConfig] = None):
        self.a = a
        self.b = b
        self.config = config or AppConfig()

    def compare(self, tolerance: Optional[float] = None) -> TrajectoryDiff:
        """Compare both trajectories and return their differences"""
        tol = agreement_tolerance([self.a, self.b], self.config) if tolerance is None else tolerance
        r, pa, pb = _common(self.a, self.b)
        delta = np.abs(pa - pb)
        worst = int(np.argmax(delta)) if len(delta) else 0
        return TrajectoryDiff(
            label_a=self.a.label,
            label_b=self.b.label,
            sup_distance=float(delta[worst]) if len(delta) else 0.0,
            argmax_r=float(r[worst]) if len(r) else 0.0,
            horizon=agreement_horizon(self.a, self.b, tol),
            tolerance=tol,
        )

    @staticmethod
    def get_diff_summary(diffs: List[TrajectoryDiff]) -> str:
        """Human-readable summary of several comparisons"""
        summary = ["Trajectory Comparison Summary:"]
        for diff in diffs:
            state = "agree" if diff.agrees else "differ"
            summary.append(
                f"  {diff.label_a} vs {diff.label_b}: {state}, sup |d<n>| = {diff.sup_distance:.4g} "
                f"at r = {diff.argmax_r:g} (tolerance {diff.tolerance:.3g}, agree up to r = {diff.horizon:g})"
            )
        return "\n".join(summary)


def pairwise_distances(trajectories: Dict[int, Trajectory]) -> Dict[Tuple[int, int], float]:
    """Sup distance for every pair of dims, keyed (smaller dim, larger dim)"""
    dims = sorted(trajectories)
    return {(a, b): sup_distance(trajectories[a], trajectories[b])
            for i, a in enumerate(dims) for b in dims[i + 1:]}
