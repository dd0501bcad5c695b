"""
squeeze-lab - Numerical lab for generalized n-photon squeezing
"""

__version__ = "0.1.0"

# Config
from .config import AppConfig, configure_logging

# Errors
from .exceptions import (
    ChebyshevConvergenceError,
    ConfigError,
    EmitError,
    FitError,
    MethodRefusedError,
    NoFlipError,
    NormalizationError,
    PropagationError,
    RegulationError,
    SpecError,
    SpectrumConvergenceError,
    SpectrumError,
    SqueezeLabError,
)

# Core
from .core import (
    JacobiMatrix,
    KerrSpec,
    PropagationConfig,
    SAClassification,
    SAVerdict,
    SpectrumResult,
    Trajectory,
    TruncationSpec,
    build_hamiltonian,
    classify,
    propagate_spec,
    propagate_vacuum,
    spectrum,
)

# Converters
from .converters import emit_report_json, emit_spectrum_csv, emit_trajectory_csv

# Managers
from .managers import (
    BatchOperationManager,
    TrajectoryComparator,
    kerr_sweep,
    parity_experiment,
    run_preset,
    threshold_detect,
)

# Utils
from .utils import ManifestRecorder, ParameterValidator, PerformanceProfiler

__all__ = [
    "__version__",
    # Config
    "AppConfig",
    "configure_logging",
    # Errors
    "ChebyshevConvergenceError",
    "ConfigError",
    "EmitError",
    "FitError",
    "MethodRefusedError",
    "NoFlipError",
    "NormalizationError",
    "PropagationError",
    "RegulationError",
    "SpecError",
    "SpectrumConvergenceError",
    "SpectrumError",
    "SqueezeLabError",
    # Core
    "JacobiMatrix",
    "KerrSpec",
    "PropagationConfig",
    "SAClassification",
    "SAVerdict",
    "SpectrumResult",
    "Trajectory",
    "TruncationSpec",
    "build_hamiltonian",
    "classify",
    "propagate_spec",
    "propagate_vacuum",
    "spectrum",
    # Converters
    "emit_report_json",
    "emit_spectrum_csv",
    "emit_trajectory_csv",
    # Managers
    "BatchOperationManager",
    "TrajectoryComparator",
    "kerr_sweep",
    "parity_experiment",
    "run_preset",
    "threshold_detect",
    # Utils
    "ManifestRecorder",
    "ParameterValidator",
    "PerformanceProfiler",
]
