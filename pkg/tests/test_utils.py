"""
Tests for squeeze-lab utilities and configuration
"""

import hashlib
import json
import logging

import pytest

from squeeze_lab.config import OUT_DIR_ENV, AppConfig, configure_logging
from squeeze_lab.exceptions import ConfigError
from squeeze_lab.utils import ManifestRecorder, ParameterValidator, PerformanceProfiler
from squeeze_lab.utils.manifest import MANIFEST_NAME, file_hash, load_manifest


def test_manifest_records_hashes(tmp_path):
    """Outputs are listed relative to out_dir with their sha256"""
    out = tmp_path / "data.csv"
    out.write_bytes(b"r,photon_number\n0.0,0.0\n")
    recorder = ManifestRecorder("propagate", {"n": 5}, tmp_path, tool_version="9.9")
    recorder.record(out)
    recorder.add_parameters(method_used="spectral")
    path = recorder.finish()

    assert path == tmp_path / MANIFEST_NAME
    manifest = load_manifest(path)
    assert manifest.command == "propagate"
    assert manifest.parameters == {"n": 5, "method_used": "spectral"}
    assert manifest.tool_version == "9.9"
    assert manifest.finished is not None
    assert manifest.outputs[0].path == "data.csv"
    assert manifest.outputs[0].sha256 == hashlib.sha256(out.read_bytes()).hexdigest()
    assert file_hash(out) == manifest.outputs[0].sha256


def test_manifest_default_version(tmp_path):
    """Tool version defaults to the package version"""
    from squeeze_lab import __version__

    recorder = ManifestRecorder("spectrum", {}, tmp_path)
    data = json.loads(recorder.finish().read_text())
    assert data["tool_version"] == __version__
    assert data["seedless"] is True


def test_performance_profiler():
    """Timers accumulate into a report with manifest entries"""
    profiler = PerformanceProfiler()
    profiler.start_timer("build")
    elapsed = profiler.end_timer("build")
    assert elapsed >= 0
    assert profiler.end_timer("never-started") == 0.0

    report = profiler.generate_report()
    assert len(report.metrics) == 1
    assert report.peak_rss_mb >= report.rss_mb > 0
    params = report.to_parameters()
    assert "timing_build_ms" in params
    assert "memory_peak_rss_mb" in params

    profiler.clear()
    assert profiler.generate_report().metrics == []


def test_validator_accepts_valid_parameters():
    """A plain propagate request passes"""
    result = ParameterValidator().validate({"n": 5, "dim": 1000, "r_max": 2.0, "dr": 0.01})
    assert result["passed"]
    assert result["errors"] == []


def test_validator_reports_errors_with_tokens():
    """Each problem names the offending value"""
    result = ParameterValidator().validate({"n": 0, "dim": 10, "kerr": 0.5, "dr": -0.1,
                                            "jobs": 0})
    assert not result["passed"]
    tokens = {e["token"] for e in result["errors"]}
    assert {"0", "0.5", "-0.1"} <= tokens
    assert len(result["errors"]) == 4


def test_validator_powering_limit_and_warnings():
    """Powering is refused above its dim limit; shallow probes only warn"""
    result = ParameterValidator().validate({"dim": 10000, "method": "powering"})
    assert result["errors"][0]["token"] == "10000"
    result = ParameterValidator().validate({"n": 4, "dim": 1, "depth": 500, "full": True})
    assert result["passed"]
    assert result["warnings"][0]["token"] == "500"
    assert result["info"][0]["token"] == "--full"


def test_config_file_overrides(tmp_path):
    """Config files override defaults; unknown keys are rejected"""
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"dr": 0.05, "jobs": 4}))
    config = AppConfig.from_file(str(good))
    assert config.dr == 0.05
    assert config.jobs == 4
    assert config.r_max == 2.0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(ConfigError) as info:
        AppConfig.from_file(str(bad))
    assert info.value.token == "colour"

    with pytest.raises(ConfigError):
        AppConfig.from_file(str(tmp_path / "missing.json"))


def test_config_env_and_merge(monkeypatch, tmp_path):
    """Environment sets the output root; None overrides are ignored"""
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    config = AppConfig.from_env()
    assert config.out_path == tmp_path
    assert config.merged(dr=None, jobs="3").jobs == 3
    with pytest.raises(ConfigError):
        config.merged(method="euler")
    with pytest.raises(ConfigError):
        config.merged(jobs="many")


def test_configure_logging():
    """Logging installs one handler however often it is configured"""
    configure_logging("debug")
    configure_logging("INFO")
    logger = logging.getLogger("squeeze_lab")
    assert logger.level == logging.INFO
    assert sum(getattr(h, "_squeeze_lab", False) for h in logger.handlers) == 1
    with pytest.raises(ConfigError):
        configure_logging("chatty")
