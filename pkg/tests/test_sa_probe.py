"""
Tests for the self-adjointness probe
"""

import json
import math

import numpy as np
import pytest

from squeeze_lab.config import AppConfig
from squeeze_lab.core.operators import KerrSpec, TruncationSpec, build_hamiltonian
from squeeze_lab.core.sa_probe import (
    SAClassification,
    SAVerdict,
    classify,
    critical_scan,
    critical_strength,
    decay_exponent,
    deficiency_solution,
    flip_bracket,
    kerr_crossover,
    minimal_solution,
)
from squeeze_lab.exceptions import SpecError

DEPTH = 100000


def test_forward_solution_satisfies_recurrence():
    """The stored solution solves (T - z) psi = 0 row by row"""
    spec = TruncationSpec(3, 1, KerrSpec(2, 0.2))
    z = 1j
    solution = deficiency_solution(spec, z, 30)
    psi = solution.to_complex()
    H = build_hamiltonian(spec.with_dim(32))
    residual = H.to_dense()[:30, :31] @ psi - z * psi[:30]
    assert psi[0] == pytest.approx(1.0)
    assert np.max(np.abs(residual) / np.maximum(np.abs(z * psi[:30]), 1e-300)) < 1e-10
    assert solution.depth == 30


def test_rescaling_keeps_growing_solutions_finite():
    """Exponentially growing solutions stay finite in the log domain"""
    solution = deficiency_solution(TruncationSpec(3, 1, KerrSpec(2, 1.0)), 1j, 50000)
    assert np.all(np.isfinite(solution.log_magnitude))
    assert solution.log_magnitude[-1] > 1000.0


def test_probe_rejects_real_spectral_parameter():
    """Im z = 0 and non-positive depths are invalid"""
    spec = TruncationSpec(3, 1)
    with pytest.raises(SpecError):
        deficiency_solution(spec, 0.5, 100)
    with pytest.raises(SpecError):
        deficiency_solution(spec, 1j, 0)


@pytest.mark.parametrize("spec", [
    TruncationSpec(1, 1),
    TruncationSpec(2, 1),
    TruncationSpec(3, 1, KerrSpec(2, 1.0)),
    TruncationSpec(3, 1, KerrSpec(2, 0.1)),
    TruncationSpec(4, 1, KerrSpec(2, 3.0)),
])
def test_limit_point_cases(spec):
    """Essentially self-adjoint generators"""
    result = classify(spec, DEPTH)
    assert result.verdict == SAVerdict.LIMIT_POINT
    assert result.probe_verdicts == {"+i": "limit_point", "-i": "limit_point"}
    assert result.describe() == "limit_point (essentially self-adjoint)"


@pytest.mark.parametrize("spec", [
    TruncationSpec(3, 1),
    TruncationSpec(4, 1),
    TruncationSpec(5, 1),
    TruncationSpec(6, 1),
    TruncationSpec(4, 1, KerrSpec(2, 1.0)),
])
def test_limit_circle_cases(spec):
    """Generators with a square-summable deficiency solution"""
    result = classify(spec, DEPTH)
    assert result.verdict == SAVerdict.LIMIT_CIRCLE
    assert np.all(result.block_ratios < 0.95)
    assert np.all(np.isfinite(result.tail_norms))
    assert np.all(np.diff(result.tail_norms) >= 0)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_decay_exponent_without_kerr(n):
    """|psi_j| ~ j^(-n/4) for the pure squeezing generator"""
    result = classify(TruncationSpec(n, 1), DEPTH)
    assert result.decay_exponent == pytest.approx(n / 4, abs=0.05)


def test_decay_exponent_quadratic_case():
    """n=2 decays only as j^(-1/4), too slow to be square summable"""
    solution = deficiency_solution(TruncationSpec(2, 1), 1j, DEPTH)
    assert decay_exponent(solution) == pytest.approx(0.25, abs=0.05)
    grow = deficiency_solution(TruncationSpec(1, 1), 1j, 20000)
    assert decay_exponent(grow) < 0


def test_verdict_stable_under_depth_doubling():
    """Verdicts agree at depth and twice the depth"""
    for spec in (TruncationSpec(4, 1), TruncationSpec(4, 1, KerrSpec(2, 3.0))):
        first = classify(spec, DEPTH)
        second = classify(spec, 2 * DEPTH)
        assert first.verdict == second.verdict
        assert first.verdict != SAVerdict.INCONCLUSIVE


def test_shallow_probe_is_inconclusive():
    """Depths below 1000 never produce a verdict"""
    result = classify(TruncationSpec(4, 1), 500)
    assert result.verdict == SAVerdict.INCONCLUSIVE
    assert result.diagnostics


def test_default_depth_from_config():
    """Depth falls back to the configured default"""
    result = classify(TruncationSpec(5, 1), config=AppConfig(sa_default_depth=4096))
    assert result.probe_depth == 4096
    assert result.to_dict()["verdict"] == "limit_circle"


def test_minimal_solution_dichotomy():
    """Kerr-dominated recurrences select a unique recessive solution"""
    dominated = minimal_solution(TruncationSpec(3, 1, KerrSpec(2, 1.0)), 1j, 2000)
    assert dominated.well_conditioned
    assert dominated.log_magnitude[0] == 0.0
    assert dominated.log_magnitude[1000] < dominated.log_magnitude[10]


def test_critical_strengths():
    """Kerr balances squeezing at K=2 (h=2) and K_4=48 (h=4)"""
    assert critical_strength(2) == pytest.approx(2.0)
    assert critical_strength(4) == pytest.approx(48.0)


def test_critical_scan_brackets_balance_point():
    """n=4, h=2 flips from limit circle to limit point around K=2"""
    strengths = [1.0, 1.5, 1.9, 2.1, 2.5, 3.0]
    results = critical_scan(4, 2, strengths, DEPTH)
    assert [r.verdict for r in results[:3]] == [SAVerdict.LIMIT_CIRCLE] * 3
    assert [r.verdict for r in results[3:]] == [SAVerdict.LIMIT_POINT] * 3
    assert flip_bracket(strengths, results) == (1.9, 2.1)
    with pytest.raises(SpecError):
        critical_scan(3, 2, strengths, DEPTH)


def test_kerr_crossover_index():
    """Kerr overtakes the coupling at j ~ (2/K)^2 / 3 for n=3, h=2"""
    assert kerr_crossover(TruncationSpec(3, 1, KerrSpec(2, 1e-3))) == pytest.approx(4e6 / 3)
    assert kerr_crossover(TruncationSpec(4, 1, KerrSpec(2, 3.0))) == 0.0
    assert math.isinf(kerr_crossover(TruncationSpec(4, 1, KerrSpec(2, 1.0))))
    assert math.isinf(kerr_crossover(TruncationSpec(5, 1, KerrSpec(2, 1.0))))
    assert math.isinf(kerr_crossover(TruncationSpec(3, 1)))


def test_weak_kerr_beyond_depth_is_inconclusive():
    """K=1e-3 only dominates past j ~ 1.3e6, so depth 1e5 gives no verdict"""
    result = classify(TruncationSpec(3, 1, KerrSpec(2, 1e-3)), DEPTH)
    assert result.verdict == SAVerdict.INCONCLUSIVE
    assert any("Kerr term dominates only beyond" in line for line in result.diagnostics)


def test_to_dict_writes_overflow_as_null():
    """Non-finite tail sums serialize as null, never Infinity"""
    result = SAClassification(SAVerdict.LIMIT_POINT, math.inf, np.array([1.0, np.inf]), 1000,
                              block_ratios=np.array([np.inf, 2.0]))
    payload = result.to_dict()
    assert payload["tail_norms"] == [1.0, None]
    assert payload["block_ratios"] == [None, 2.0]
    assert payload["decay_exponent"] is None
    json.dumps(payload, allow_nan=False)
