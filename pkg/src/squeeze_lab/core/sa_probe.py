"""
Self-Adjointness Probe
Classifies the infinite Jacobi operator behind a TruncationSpec as limit point
(essentially self-adjoint) or limit circle by testing whether solutions of the
deficiency equation T psi = z psi are square summable
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from ..config import AppConfig
from ..exceptions import SpecError
from .operators import KerrSpec, TruncationSpec

logger = logging.getLogger(__name__)

MIN_DEPTH = 1000
STABLE_DEPTH = 100000
NON_DECREASING_RATIO = 0.98
PROBES = (1j, -1j)

# Blocks [2^(k-1), 2^k) below this start are transient and never classified
_FIRST_BLOCK = 64
_RATIOS_USED = 6
_RESCALE_HIGH = 1e150
_RESCALE_LOW = 1e-150


class SAVerdict(Enum):
    """Weyl alternative outcome"""
    LIMIT_POINT = "limit_point"
    LIMIT_CIRCLE = "limit_circle"
    INCONCLUSIVE = "inconclusive"

    def describe(self) -> str:
        meaning = {
            SAVerdict.LIMIT_POINT: "essentially self-adjoint",
            SAVerdict.LIMIT_CIRCLE: "not essentially self-adjoint",
            SAVerdict.INCONCLUSIVE: "no verdict at this depth",
        }[self]
        return f"{self.value} ({meaning})"


@dataclass(frozen=True)
class DeficiencySolution:
    """Solution of the deficiency recurrence stored as log-magnitude and phase"""
    z: complex
    log_magnitude: np.ndarray
    phase: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.log_magnitude) - 1

    def to_complex(self) -> np.ndarray:
        """psi_j as complex numbers; entries overflow to inf for growing solutions"""
        with np.errstate(over="ignore"):
            return np.exp(self.log_magnitude) * np.exp(1j * self.phase)

    def log_block_sums(self, depth: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """(J, log sum_{J/2 < j <= J} |psi_j|^2) for J = 2, 4, 8, ... <= depth"""
        depth = self.depth if depth is None else min(depth, self.depth)
        log_sq = 2.0 * self.log_magnitude
        edges, sums = [], []
        J = 2
        while J <= depth:
            edges.append(J)
            sums.append(float(np.logaddexp.reduce(log_sq[J // 2 + 1:J + 1])))
            J *= 2
        return np.array(edges, dtype=np.int64), np.array(sums)

    def log_tail_norms(self, depth: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """(J, log sum_{j <= J} |psi_j|^2) at J = 2, 4, 8, ..."""
        edges, blocks = self.log_block_sums(depth)
        head = 2.0 * self.log_magnitude[0:2]
        partial = np.logaddexp.accumulate(np.concatenate([[np.logaddexp.reduce(head)], blocks]))
        return edges, partial[1:]


@dataclass(frozen=True)
class MinimalSolution:
    """Backward (Miller) recursion result with the agreement of two trial tails"""
    z: complex
    log_magnitude: np.ndarray
    phase: np.ndarray
    tail_agreement: float
    match_index: int

    @property
    def well_conditioned(self) -> bool:
        return self.tail_agreement < 1e-6


@dataclass
class SAClassification:
    """Verdict of the probe with the evidence behind it"""
    verdict: SAVerdict
    decay_exponent: float
    tail_norms: np.ndarray
    probe_depth: int
    label: str = ""
    tail_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    block_ratios: np.ndarray = field(default_factory=lambda: np.zeros(0))
    probe_verdicts: Dict[str, str] = field(default_factory=dict)
    diagnostics: List[str] = field(default_factory=list)

    def describe(self) -> str:
        return self.verdict.describe()

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "verdict": self.verdict.value,
            "description": self.describe(),
            "decay_exponent": _finite_or_none(self.decay_exponent),
            "probe_depth": self.probe_depth,
            "tail_indices": [int(j) for j in self.tail_indices],
            "tail_norms": [_finite_or_none(v) for v in self.tail_norms],
            "block_ratios": [_finite_or_none(v) for v in self.block_ratios],
            "probe_verdicts": dict(self.probe_verdicts),
            "diagnostics": list(self.diagnostics),
        }



def _finite_or_none(value) -> Optional[float]:
    """JSON has no inf; overflowed tail sums are written as null"""
    value = float(value)
    return value if math.isfinite(value) else None


@njit(nogil=True, cache=True)
def _log_coupling(n, j):
    s = 0.0
    for k in range(1, n + 1):
        s += math.log(n * j + k)
    return 0.5 * s


@njit(nogil=True, cache=True)
def _kerr_energy(n, order, coefficient, j):
    if order == 0:
        return 0.0
    m = float(n * j)
    falling = 1.0
    for k in range(order):
        falling *= m - k
    return coefficient * max(falling, 0.0)


@njit(nogil=True, cache=True)
def _forward_kernel(n, order, coefficient, z, depth, log_mag, phase):
    # t_{j-1} psi_{j-1} + d_j psi_j + t_j psi_{j+1} = z psi_j, psi_0 = 1
    prev = 0.0 + 0.0j
    cur = 1.0 + 0.0j
    scale = 0.0
    t_prev = 0.0
    log_mag[0] = 0.0
    phase[0] = 0.0
    for j in range(depth):
        t_j = math.exp(_log_coupling(n, j))
        nxt = ((z - _kerr_energy(n, order, coefficient, j)) * cur - t_prev * prev) / t_j
        prev = cur
        cur = nxt
        t_prev = t_j
        a = abs(cur)
        if a > _RESCALE_HIGH or (0.0 < a < _RESCALE_LOW):
            prev /= a
            cur /= a
            scale += math.log(a)
        log_mag[j + 1] = scale + np.log(abs(cur))
        phase[j + 1] = math.atan2(cur.imag, cur.real)


@njit(nogil=True, cache=True)
def _backward_kernel(n, order, coefficient, z, depth, tail_next, tail_here, log_mag, phase):
    # psi_{j-1} = ((z - d_j) psi_j - t_j psi_{j+1}) / t_{j-1}, started at j = depth
    nxt = tail_next
    cur = tail_here
    scale = 0.0
    log_mag[depth] = np.log(abs(cur))
    phase[depth] = math.atan2(cur.imag, cur.real)
    for j in range(depth, 0, -1):
        t_j = math.exp(_log_coupling(n, j))
        t_below = math.exp(_log_coupling(n, j - 1))
        prev = ((z - _kerr_energy(n, order, coefficient, j)) * cur - t_j * nxt) / t_below
        nxt = cur
        cur = prev
        a = abs(cur)
        if a > _RESCALE_HIGH or (0.0 < a < _RESCALE_LOW):
            nxt /= a
            cur /= a
            scale += math.log(a)
        log_mag[j - 1] = scale + np.log(abs(cur))
        phase[j - 1] = math.atan2(cur.imag, cur.real)


def _kernel_args(spec: TruncationSpec) -> Tuple[int, int, float]:
    if spec.kerr is None or spec.kerr.strength == 0:
        return int(spec.n), 0, 0.0
    return int(spec.n), int(spec.kerr.order), float(spec.kerr.coefficient)


def kerr_crossover(spec: TruncationSpec) -> float:
    """
    Index j beyond which the Kerr diagonal exceeds twice the coupling, d_j >= 2 t_j

    Uses the leading growth d_j ~ c (nj)^h and t_j ~ (nj)^(n/2). Returns 0 when the
    Kerr term dominates from the start and inf when it never does (no Kerr term,
    n > 2h, or n = 2h below the critical strength).
    """
    if spec.kerr is None or spec.kerr.strength == 0:
        return math.inf
    c = spec.kerr.coefficient
    excess = spec.kerr.order - 0.5 * spec.n
    if excess < 0:
        return math.inf
    if excess == 0:
        return 0.0 if c >= 2.0 else math.inf
    return (2.0 / c) ** (1.0 / excess) / spec.n


def _check_probe(z: complex, depth: int):
    if complex(z).imag == 0:
        raise SpecError(f"deficiency probe needs Im z != 0, got {z}")
    if int(depth) != depth or depth < 1:
        raise SpecError(f"probe depth must be a positive integer, got {depth}")


def deficiency_solution(spec: TruncationSpec, z: complex, depth: int) -> DeficiencySolution:
    """Forward solution of the deficiency equation from psi_0 = 1 up to j = depth"""
    _check_probe(z, depth)
    depth = int(depth)
    n, order, coefficient = _kernel_args(spec)
    log_mag = np.empty(depth + 1)
    phase = np.empty(depth + 1)
    _forward_kernel(n, order, coefficient, complex(z), depth, log_mag, phase)
    return DeficiencySolution(complex(z), log_mag, phase)


def minimal_solution(spec: TruncationSpec, z: complex, depth: int) -> MinimalSolution:
    """
    Miller backward recursion from two trial tails

    Both trials are normalized at the midpoint; their agreement below it measures
    how well a unique minimal (recessive) solution is selected. Good agreement
    signals a dominant/recessive dichotomy, poor agreement that all solutions
    behave alike.
    """
    _check_probe(z, depth)
    depth = int(depth)
    n, order, coefficient = _kernel_args(spec)
    trials = []
    for tail_next, tail_here in ((0.0 + 0.0j, 1.0 + 0.0j), (1.0 + 0.0j, 1.0 + 0.0j)):
        log_mag = np.empty(depth + 1)
        phase = np.empty(depth + 1)
        _backward_kernel(n, order, coefficient, complex(z), depth, tail_next, tail_here,
                         log_mag, phase)
        trials.append((log_mag, phase))

    mid = depth // 2
    (log_a, phase_a), (log_b, phase_b) = trials
    log_a = log_a - log_a[mid]
    phase_a = phase_a - phase_a[mid]
    log_b = log_b - log_b[mid]
    phase_b = phase_b - phase_b[mid]
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = np.exp((log_a - log_b)[:mid + 1] + 1j * (phase_a - phase_b)[:mid + 1])
        agreement = float(np.nanmax(np.abs(ratio - 1.0)))
    # Normalize the result to psi_0 = 1
    log_a = log_a - log_a[0]
    phase_a = np.angle(np.exp(1j * (phase_a - phase_a[0])))
    logger.debug("minimal solution at depth %d: tail agreement %.3e", depth, agreement)
    return MinimalSolution(complex(z), log_a, phase_a, agreement, mid)


def decay_exponent(solution: DeficiencySolution, depth: Optional[int] = None) -> float:
    """
    Fitted p in |psi_j| ~ j^(-p) over the last four octaves

    The amplitude combines neighbours, sqrt(|psi_j|^2 + |psi_{j+1}|^2), since even
    and odd entries decay along separate envelopes. Negative p means growth.
    """
    depth = solution.depth if depth is None else min(depth, solution.depth)
    lo = max(depth // 16, 2)
    j = np.unique(np.geomspace(lo, depth - 1, num=256).astype(np.int64))
    log_amp = 0.5 * np.logaddexp(2.0 * solution.log_magnitude[j], 2.0 * solution.log_magnitude[j + 1])
    slope = np.polyfit(np.log(j), log_amp, 1)[0]
    return float(-slope)


def _verdict_from_ratios(log_ratios: np.ndarray, block_ratio: float) -> SAVerdict:
    if len(log_ratios) == 0:
        return SAVerdict.INCONCLUSIVE
    if np.all(log_ratios < math.log(block_ratio)):
        return SAVerdict.LIMIT_CIRCLE
    if np.all(log_ratios >= math.log(NON_DECREASING_RATIO)):
        return SAVerdict.LIMIT_POINT
    return SAVerdict.INCONCLUSIVE


def _classify_solution(solution: DeficiencySolution, depth: int,
                       block_ratio: float) -> Tuple[SAVerdict, np.ndarray]:
    edges, log_blocks = solution.log_block_sums(depth)
    log_ratios = np.diff(log_blocks)[edges[1:] // 2 >= _FIRST_BLOCK]
    log_ratios = log_ratios[-_RATIOS_USED:]
    return _verdict_from_ratios(log_ratios, block_ratio), log_ratios


def classify(spec: TruncationSpec, depth: Optional[int] = None,
             config: Optional[AppConfig] = None) -> SAClassification:
    """
    Weyl-alternative verdict from geometric block sums of |psi_j|^2

    Block sums shrinking by a factor below sa_block_ratio mean a square-summable
    solution (limit circle); non-decreasing or diverging sums mean limit point.
    The probe runs at z = +i and z = -i, each to twice the requested depth, and
    reports a verdict only when both probes and both depths agree.
    """
    config = config or AppConfig()
    depth = int(config.sa_default_depth if depth is None else depth)
    label = spec.label()
    if depth < MIN_DEPTH:
        return SAClassification(SAVerdict.INCONCLUSIVE, 0.0, np.zeros(0), depth, label=label,
                                diagnostics=[f"depth {depth} below {MIN_DEPTH}"])

    diagnostics: List[str] = []
    probe_verdicts: Dict[str, str] = {}
    verdicts = set()
    reference = None
    for z in PROBES:
        solution = deficiency_solution(spec, z, 2 * depth)
        verdict, log_ratios = _classify_solution(solution, depth, config.sa_block_ratio)
        doubled, _ = _classify_solution(solution, 2 * depth, config.sa_block_ratio)
        key = "+i" if z.imag > 0 else "-i"
        probe_verdicts[key] = verdict.value
        if doubled != verdict:
            diagnostics.append(f"z={key}: {verdict.value} at depth {depth} but "
                               f"{doubled.value} at depth {2 * depth}")
            verdict = SAVerdict.INCONCLUSIVE
        verdicts.add(verdict)
        if reference is None:
            reference = (solution, log_ratios)

    if len(verdicts) > 1:
        diagnostics.append(f"probes disagree: {probe_verdicts}")
        verdict = SAVerdict.INCONCLUSIVE
    else:
        verdict = verdicts.pop()
    crossover = kerr_crossover(spec)
    if verdict != SAVerdict.INCONCLUSIVE and math.isfinite(crossover) and crossover > depth:
        # Up to this depth the recurrence is still the Kerr-free one
        diagnostics.append(f"Kerr term dominates only beyond j ~ {crossover:.3g}; "
                           f"depth {depth} sees the Kerr-free tail")
        verdict = SAVerdict.INCONCLUSIVE
    if depth < STABLE_DEPTH:
        diagnostics.append(f"depth {depth} below {STABLE_DEPTH}; verdict not depth-stable")
    for line in diagnostics:
        logger.warning("%s: %s", label, line)

    solution, log_ratios = reference
    edges, log_tails = solution.log_tail_norms(depth)
    with np.errstate(over="ignore"):
        tail_norms = np.exp(log_tails)
        block_ratios = np.exp(log_ratios)
    exponent = decay_exponent(solution, depth)
    logger.info("%s: %s (decay exponent %.3f, depth %d)", label, verdict.value, exponent, depth)
    return SAClassification(verdict, exponent, tail_norms, depth, label=label, tail_indices=edges,
                            block_ratios=block_ratios, probe_verdicts=probe_verdicts,
                            diagnostics=diagnostics)


def critical_strength(order: int) -> float:
    """Kerr strength at which Kerr and squeezing balance for n = 2h (K=2, or K_4=48)"""
    probe = KerrSpec(order, 1.0)
    return 2.0 / probe.coefficient


def critical_scan(n: int, order: int, strengths: Sequence[float], depth: Optional[int] = None,
                  config: Optional[AppConfig] = None) -> List[SAClassification]:
    """Classifications across Kerr strengths for the critical family n = 2h"""
    kerr = KerrSpec(order, 0.0)
    if n != 2 * kerr.order:
        raise SpecError(f"critical scan needs n = 2h, got n={n}, h={order}")
    return [classify(TruncationSpec(n, 1, kerr.with_strength(float(k))), depth, config)
            for k in strengths]


def flip_bracket(strengths: Sequence[float],
                 results: Sequence[SAClassification]) -> Optional[Tuple[float, float]]:
    """Adjacent strengths between which the verdict changes from limit circle to limit point"""
    for k in range(len(results) - 1):
        if (results[k].verdict == SAVerdict.LIMIT_CIRCLE
                and results[k + 1].verdict == SAVerdict.LIMIT_POINT):
            return float(strengths[k]), float(strengths[k + 1])
    # Allow one inconclusive point at the boundary
    for k in range(len(results) - 2):
        if (results[k].verdict == SAVerdict.LIMIT_CIRCLE
                and results[k + 1].verdict == SAVerdict.INCONCLUSIVE
                and results[k + 2].verdict == SAVerdict.LIMIT_POINT):
            return float(strengths[k]), float(strengths[k + 2])
    return None
