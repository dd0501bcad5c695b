"""
Tests for parity, convergence and Kerr-sweep experiments
"""

import pytest

from squeeze_lab.config import AppConfig
from squeeze_lab.core.operators import TruncationSpec
from squeeze_lab.core.propagate import PropagationConfig, propagate_spec
from squeeze_lab.exceptions import NoFlipError, RegulationError, SpecError
from squeeze_lab.managers.experiments import (
    SweepReport,
    convergence_experiment,
    critical_point_report,
    kerr_sweep,
    max_photon_table,
    parity_dims,
    parity_experiment,
    regulation_calibration,
    threshold_detect,
    variable_k_panel,
)


def _verdict_report(n, order, regulated):
    """Sweep report carrying verdicts only"""
    strengths = sorted(regulated)
    return SweepReport(n, order, strengths, [1000, 1001], {}, {}, {}, dict(regulated), {})


def test_parity_dims():
    """Desk scale uses 4N, full scale 10N"""
    assert parity_dims(1000) == (1000, 1001, 4000, 4001)
    assert parity_dims(1000, full=True) == (1000, 1001, 10000, 10001)
    assert parity_dims(200, config=AppConfig(desk_large_factor=2)) == (200, 201, 400, 401)


def test_parity_requires_even_base():
    """Odd or tiny base sizes are rejected"""
    with pytest.raises(SpecError):
        parity_experiment(5, 1001)
    with pytest.raises(SpecError):
        parity_experiment(5, 50)


def test_threshold_from_verdicts():
    """Threshold is the midpoint of the last unregulated/regulated pair"""
    estimate = threshold_detect(_verdict_report(3, 2, {1e-3: False, 1e-2: False, 1e-1: True,
                                                       1.0: True}))
    assert estimate.bracket == (1e-2, 1e-1)
    assert float(estimate) == pytest.approx(0.055)
    assert estimate.analytic == pytest.approx(3000 ** -0.5)
    assert estimate.critical is None
    assert estimate.to_dict()["bracket"] == [1e-2, 1e-1]


def test_threshold_skips_non_monotone_verdicts():
    """A relapse near the critical point moves the bracket to the last flip"""
    estimate = threshold_detect(_verdict_report(4, 2, {1.8: False, 1.9: True, 2.0: False,
                                                       2.1: True, 2.5: True}))
    assert estimate.bracket == (2.0, 2.1)
    assert estimate.critical == pytest.approx(2.0)


def test_threshold_without_flip():
    """All-regulated or never-regulated sweeps have no threshold"""
    with pytest.raises(NoFlipError) as info:
        threshold_detect(_verdict_report(3, 2, {0.1: True, 1.0: True}))
    assert info.value.verdicts == {0.1: True, 1.0: True}
    with pytest.raises(NoFlipError):
        threshold_detect(_verdict_report(3, 2, {0.1: False, 1.0: False}))


def test_sweep_argument_checks():
    """Sweeps need an adjacent dim pair and increasing strengths"""
    with pytest.raises(SpecError):
        kerr_sweep(3, 2, [0.1, 1.0], [200, 400])
    with pytest.raises(SpecError):
        kerr_sweep(3, 2, [1.0, 0.1], [200, 201])


def test_small_sweep_report():
    """A strongly Kerr-dominated strength is regulated, with per-strength diagnostics"""
    report = kerr_sweep(3, 2, [1e-4, 1.0], [200, 201])
    assert report.regulated == {1e-4: False, 1.0: True}
    assert set(report.distances[1.0]) == {"200-201"}
    assert report.dominance[(1.0, 200)] == pytest.approx(600 ** 0.5)
    assert report.horizons[1e-4] < report.horizons[1.0]
    table = max_photon_table(report)
    assert table.shape == (2, 2)
    assert regulation_calibration(report) == {1.0: report.dominance[(1.0, 200)]}
    assert report.to_dict()["regulated"] == {"0.0001": False, "1.0": True}


def test_variable_k_panel_requires_regulation():
    """Panels refuse strengths whose trajectories depend on the truncation"""
    report = variable_k_panel(3, 2, [1.0, 2.0], dim=200)
    assert report.dims == [200, 201]
    assert all(report.regulated.values())
    assert report.trend.strengths == (1.0, 2.0)
    assert report.to_dict()["trend"]["strengths"] == [1.0, 2.0]
    with pytest.raises(RegulationError) as info:
        variable_k_panel(3, 2, [1e-4], dim=200)
    assert info.value.strength == 1e-4


def test_critical_point_needs_balanced_orders():
    """The balance point exists only for n = 2h"""
    with pytest.raises(SpecError):
        critical_point_report(n=3, kerr_order=2)


@pytest.mark.slow
def test_parity_dichotomy_n5():
    """Odd truncations stay small while even truncations agree with each other"""
    report = parity_experiment(5, 1000, r_max=2.0)
    even, odd, even_large, odd_large = report.dims
    even_max = report.max_photon[even]
    assert report.max_photon[odd] == pytest.approx(0.4, abs=0.05)
    assert report.max_photon[odd_large] == pytest.approx(report.max_photon[odd], rel=0.05)
    assert report.pair_distance["even_even"] < 0.05 * even_max
    assert report.pair_distance["even_odd"] > 0.5 * even_max
    assert report.pair_distance["even_even"] < 0.05 * report.pair_distance["even_odd"]
    assert report.pair_distance["odd_odd"] < 0.05 * report.pair_distance["even_odd"]


@pytest.mark.slow
def test_odd_track_height_n6():
    """n=6 odd truncations barely leave the vacuum"""
    t = propagate_spec(TruncationSpec(6, 1001), PropagationConfig(r_max=2.0, dr=0.01))
    assert t.max_photon == pytest.approx(0.09, abs=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 4])
def test_even_track_amplitude_grows(n):
    """Even-track peaks keep growing with the truncation size"""
    report = convergence_experiment(n, (1000, 4000), r_max=2.0)
    assert report.growth() >= 1.2


@pytest.mark.slow
def test_quadratic_kerr_threshold_n3():
    """n=3 flips from unregulated at K=1e-2 to regulated at K=1e-1"""
    report = kerr_sweep(3, 2, [1e-3, 1e-2, 1e-1, 1.0], [1000, 1001])
    assert report.regulated == {1e-3: False, 1e-2: False, 1e-1: True, 1.0: True}
    estimate = threshold_detect(report)
    assert estimate.bracket == (1e-2, 1e-1)
    assert estimate.bracket[0] < estimate.analytic < estimate.bracket[1]
    for k, ratio in regulation_calibration(report).items():
        assert ratio >= 0.25


@pytest.mark.slow
def test_critical_threshold_n4():
    """n=4 with quadratic Kerr regulates at K=2 whatever the adjacent pair"""
    strengths = [1.0, 1.5, 1.9, 2.1, 2.5, 3.0]
    small = kerr_sweep(4, 2, strengths, [1000, 1001])
    large = kerr_sweep(4, 2, strengths, [2000, 2001])
    assert threshold_detect(small).value == pytest.approx(2.0, abs=0.1)
    assert small.regulated == large.regulated
