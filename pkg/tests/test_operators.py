"""
Tests for truncated Hamiltonian construction
"""

import math

import numpy as np
import pytest

from squeeze_lab.core.operators import (
    KerrSpec,
    TruncationSpec,
    build_hamiltonian,
    dominance_ratio,
    gauge_vector,
    kerr_diagonal,
    kerr_diagonals,
    kerr_threshold,
    ladder_couplings,
    physical_matrix,
)
from squeeze_lab.exceptions import SpecError


def test_ladder_couplings_small_orders():
    """Couplings are sqrt((nj+1)...(nj+n))"""
    np.testing.assert_allclose(ladder_couplings(1, 4), np.sqrt([1, 2, 3, 4]), rtol=1e-15)
    np.testing.assert_allclose(ladder_couplings(2, 3), np.sqrt([2, 12, 30]), rtol=1e-15)
    assert ladder_couplings(3, 2)[0] == pytest.approx(math.sqrt(6), rel=1e-15)
    assert ladder_couplings(3, 2)[1] == pytest.approx(math.sqrt(120), rel=1e-15)
    assert len(ladder_couplings(4, 0)) == 0


def test_ladder_couplings_large_index_stays_finite():
    """Log-domain products do not overflow for large n*j"""
    t = ladder_couplings(6, 20000)
    assert np.all(np.isfinite(t))
    j = 19999
    expected = math.exp(0.5 * sum(math.log(6 * j + k) for k in range(1, 7)))
    assert t[-1] == pytest.approx(expected, rel=1e-12)
    assert np.all(np.diff(t) > 0)


def test_kerr_diagonal_falling_factorial():
    """Kerr energies use the falling factorial m(m-1)...(m-h+1)"""
    quadratic = KerrSpec(2, 0.5)
    assert kerr_diagonal(0, quadratic) == 0.0
    assert kerr_diagonal(1, quadratic) == 0.0
    assert kerr_diagonal(3, quadratic) == pytest.approx(3.0)

    quartic = KerrSpec(4, 24.0)
    assert quartic.coefficient == pytest.approx(1.0)
    assert kerr_diagonal(3, quartic) == 0.0
    assert kerr_diagonal(4, quartic) == pytest.approx(24.0)
    assert kerr_diagonal(6, quartic) == pytest.approx(360.0)

    np.testing.assert_allclose(kerr_diagonals(np.array([0, 3, 6]), quadratic), [0.0, 3.0, 15.0])
    assert kerr_diagonal(5, None) == 0.0

    with pytest.raises(SpecError):
        kerr_diagonal(-1, quadratic)


def test_invalid_specs_rejected():
    """Bad orders, dims and strengths raise SpecError"""
    with pytest.raises(SpecError):
        TruncationSpec(0, 10)
    with pytest.raises(SpecError):
        TruncationSpec(3, 0)
    with pytest.raises(SpecError):
        KerrSpec(3, 1.0)
    with pytest.raises(SpecError):
        KerrSpec(2, -1.0)
    with pytest.raises(SpecError):
        KerrSpec(2, float("nan"))


def test_build_hamiltonian_shapes():
    """Jacobi form has dim diagonal and dim-1 coupling entries"""
    H = build_hamiltonian(TruncationSpec(3, 5, KerrSpec(2, 0.1)))
    assert H.dim == 5
    assert len(H.offdiag) == 4
    assert H.has_kerr
    np.testing.assert_allclose(H.diag, 0.1 * np.array([0, 6, 30, 72, 132]))

    single = build_hamiltonian(TruncationSpec(2, 1))
    assert single.dim == 1
    assert len(single.offdiag) == 0
    assert not single.has_kerr
    assert single.gershgorin_bound() == 0.0


def test_matvec_matches_dense():
    """Matrix-free product equals the dense matrix product"""
    H = build_hamiltonian(TruncationSpec(2, 30, KerrSpec(4, 1e-3)))
    v = np.random.default_rng(7).standard_normal(30)
    np.testing.assert_allclose(H.matvec(v), H.to_dense() @ v, rtol=1e-13)
    assert H.gershgorin_bound() >= np.max(np.abs(np.linalg.eigvalsh(H.to_dense())))


def test_physical_matrix_is_gauge_transform():
    """Physical matrix equals D T D^dag with D = diag(i^j)"""
    for n in (1, 2, 3):
        H = build_hamiltonian(TruncationSpec(n, 8, KerrSpec(2, 0.3)))
        D = np.diag(gauge_vector(8))
        physical = physical_matrix(H)
        np.testing.assert_allclose(physical, D @ H.to_dense() @ D.conj().T, atol=1e-12)
        np.testing.assert_allclose(physical, physical.conj().T, atol=0)
        assert physical[1, 0] == pytest.approx(1j * H.offdiag[0])
        assert physical[0, 1] == pytest.approx(-1j * H.offdiag[0])


def test_dominance_ratio_quoted_values():
    """n=3, N=1000: K=0.01 gives 0.55 and K=0.1 gives 5.5"""
    low = TruncationSpec(3, 1000, KerrSpec(2, 0.01))
    high = TruncationSpec(3, 1000, KerrSpec(2, 0.1))
    assert dominance_ratio(low) == pytest.approx(0.5477, abs=1e-4)
    assert dominance_ratio(high) == pytest.approx(5.477, abs=1e-3)
    assert dominance_ratio(TruncationSpec(3, 1000, KerrSpec(2, 0.0))) == 0.0
    with pytest.raises(SpecError):
        dominance_ratio(TruncationSpec(3, 1000))


def test_kerr_threshold_estimates():
    """Strength where Kerr and squeezing balance at the truncation edge"""
    assert kerr_threshold(3, 2, 1000) == pytest.approx(3000 ** -0.5, rel=1e-12)
    assert kerr_threshold(3, 4, 1000) == pytest.approx(24 * 3000 ** -2.5, rel=1e-12)
    # n = 2h: independent of the truncation size
    assert kerr_threshold(4, 2, 1000) == pytest.approx(1.0, rel=1e-12)
    assert kerr_threshold(4, 2, 50000) == pytest.approx(1.0, rel=1e-12)


def test_spec_label():
    """Labels name order, size and Kerr term"""
    assert TruncationSpec(3, 1000).label() == "n3_N1000"
    assert TruncationSpec(3, 1000, KerrSpec(2, 0.1)).label() == "n3_N1000_h2_K0.1"
    assert TruncationSpec(4, 10).max_photon_number == 36
