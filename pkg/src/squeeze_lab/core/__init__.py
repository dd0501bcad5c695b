"""
Core numerics: truncated Hamiltonians, propagation, spectra and the self-adjointness probe
"""

from .operators import (
    JacobiMatrix,
    KerrSpec,
    TruncationSpec,
    build_hamiltonian,
    dominance_ratio,
    kerr_threshold,
    ladder_couplings,
)
from .propagate import (
    PropagationConfig,
    PropagationMethod,
    Trajectory,
    dense_oracle,
    photon_number,
    propagate_spec,
    propagate_vacuum,
)
from .spectral import (
    PowerLawFit,
    SpectrumResult,
    charpoly_roots,
    fit_power_law,
    interleaved_fit,
    spectrum,
)
from .sa_probe import SAClassification, SAVerdict, classify, critical_scan, kerr_crossover

__all__ = [
    "JacobiMatrix",
    "KerrSpec",
    "TruncationSpec",
    "build_hamiltonian",
    "dominance_ratio",
    "kerr_threshold",
    "ladder_couplings",
    "PropagationConfig",
    "PropagationMethod",
    "Trajectory",
    "dense_oracle",
    "photon_number",
    "propagate_spec",
    "propagate_vacuum",
    "PowerLawFit",
    "SpectrumResult",
    "charpoly_roots",
    "fit_power_law",
    "interleaved_fit",
    "spectrum",
    "SAClassification",
    "SAVerdict",
    "classify",
    "critical_scan",
    "kerr_crossover",
]
