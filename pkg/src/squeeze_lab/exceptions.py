"""
Exceptions
Error hierarchy shared by the library and the command-line front end
"""

from typing import Dict, Optional


class SqueezeLabError(Exception):
    """Base class for all squeeze-lab errors"""


class SpecError(SqueezeLabError, ValueError):
    """Invalid truncation or Kerr specification"""


class ConfigError(SqueezeLabError, ValueError):
    """Invalid configuration value or flag"""

    def __init__(self, message: str, token: Optional[str] = None):
        super().__init__(message)
        self.token = token


class NormalizationError(SqueezeLabError, ValueError):
    """State vector is not normalized"""


class ChebyshevConvergenceError(SqueezeLabError):
    """Chebyshev series for one step would exceed the term budget"""

    def __init__(self, required_terms: int, max_terms: int, dr: float):
        super().__init__(
            f"Chebyshev expansion needs {required_terms} terms per step of dr={dr} "
            f"(budget {max_terms}); use a smaller dr or the spectral method"
        )
        self.required_terms = required_terms
        self.max_terms = max_terms
        self.dr = dr


class MethodRefusedError(SqueezeLabError):
    """Propagation method refused for this problem size"""


class SpectrumError(SqueezeLabError, ValueError):
    """Spectrum lacks what an analysis needs (positive eigenvalues, eigenvectors)"""


class SpectrumConvergenceError(SpectrumError):
    """Tridiagonal eigensolver failed to converge"""

    def __init__(self, index: int, detail: str = ""):
        super().__init__(f"eigensolver failed to converge at eigenvalue index {index} {detail}".strip())
        self.index = index


class FitError(SqueezeLabError, ValueError):
    """Power-law fit cannot be computed"""


class NoFlipError(SqueezeLabError):
    """Sweep contains no regulated/unregulated verdict flip"""

    def __init__(self, verdicts: Dict[float, bool]):
        listing = ", ".join(f"{k:g}:{'regulated' if v else 'unregulated'}" for k, v in verdicts.items())
        super().__init__(f"no verdict flip in sweep ({listing})")
        self.verdicts = verdicts


class RegulationError(SqueezeLabError):
    """A strength expected to be regulated is not"""

    def __init__(self, strength: float, distance: float, tolerance: float):
        super().__init__(
            f"strength {strength:g} is not regulated: cross-dim distance {distance:.3g} "
            f"exceeds tolerance {tolerance:.3g}"
        )
        self.strength = strength


class PropagationError(SqueezeLabError):
    """Propagation failed for a given truncation dimension"""

    def __init__(self, dim: int, cause: Exception):
        super().__init__(f"propagation failed at dim={dim}: {cause}")
        self.dim = dim
        self.cause = cause


class EmitError(SqueezeLabError, OSError):
    """Writing an output file failed"""

    def __init__(self, path: str, cause: Exception):
        super().__init__(f"cannot write {path}: {cause}")
        self.path = path
