"""
Tests for squeeze-lab emitters
"""

import numpy as np
import pytest

from squeeze_lab.converters import emitters
from squeeze_lab.core.operators import TruncationSpec, build_hamiltonian
from squeeze_lab.core.propagate import PropagationConfig, Trajectory, propagate_spec
from squeeze_lab.core.spectral import spectrum
from squeeze_lab.exceptions import EmitError


def test_format_number():
    """Integers stay integers, floats use the shortest exact decimal"""
    assert emitters.format_number(3) == "3"
    assert emitters.format_number(np.int64(7)) == "7"
    assert emitters.format_number(0.1) == "0.1"
    assert emitters.format_number(np.float64(1e-300)) == "1e-300"
    assert float(emitters.format_number(2.0 ** 0.5)) == 2.0 ** 0.5


def test_trajectory_csv(tmp_path):
    """Trajectory files carry a header row and LF endings"""
    r = np.array([0.0, 0.01, 0.02])
    t = Trajectory(r, np.array([0.0, 1e-4, 4.000000000000001e-4]), np.zeros(3))
    path = emitters.emit_trajectory_csv(t, tmp_path / "sub" / "traj.csv")
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "r,photon_number,norm_drift"
    assert lines[3] == "0.02,0.0004000000000000001,0.0"

    back = emitters.read_trajectory_csv(path)
    assert np.array_equal(back.photon_number, t.photon_number)
    assert back.label == "traj"


def test_trajectory_csv_reemits_identical_bytes(tmp_path):
    """Reading a trajectory file and writing it again reproduces it byte for byte"""
    t = propagate_spec(TruncationSpec(3, 60), PropagationConfig(r_max=2.0, dr=0.01))
    first = emitters.emit_trajectory_csv(t, tmp_path / "first.csv")
    back = emitters.read_trajectory_csv(first)
    second = emitters.emit_trajectory_csv(back, tmp_path / "second.csv")
    assert second.read_bytes() == first.read_bytes()
    assert np.array_equal(back.norm_drift, t.norm_drift)


def test_spectrum_csv(tmp_path):
    """Spectrum files list index and ascending eigenvalue"""
    s = spectrum(build_hamiltonian(TruncationSpec(3, 2)))
    path = emitters.emit_spectrum_csv(s, tmp_path / "spec.csv")
    header, rows = emitters.read_table_csv(path)
    assert header == ["index", "eigenvalue"]
    assert [row[0] for row in rows] == ["0", "1"]
    assert float(rows[0][1]) == pytest.approx(-6 ** 0.5, rel=1e-12)
    assert float(rows[1][1]) == pytest.approx(6 ** 0.5, rel=1e-12)
    assert np.array_equal(emitters.read_spectrum_csv(path).eigenvalues, s.eigenvalues)


def test_report_json(tmp_path):
    """Reports are wrapped with a schema version and kind"""
    report = {"dims": (1000, 1001), "values": np.array([1.5, 2.5]), "count": np.int32(2)}
    path = emitters.emit_report_json(report, tmp_path / "report.json", kind="demo")
    document = emitters.read_report_json(path)
    assert document["schema_version"] == emitters.SCHEMA_VERSION
    assert document["kind"] == "demo"
    assert document["report"] == {"count": 2, "dims": [1000, 1001], "values": [1.5, 2.5]}


def test_emit_error(tmp_path):
    """Unwritable destinations raise EmitError with the path"""
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(EmitError) as info:
        emitters.emit_table_csv(["a"], [[1]], blocker / "out.csv")
    assert info.value.path.endswith("out.csv")


def test_read_rejects_foreign_header(tmp_path):
    """Readers check the header they expect"""
    path = emitters.emit_table_csv(["dim", "value"], [[1, 2.0]], tmp_path / "t.csv")
    with pytest.raises(EmitError):
        emitters.read_trajectory_csv(path)
