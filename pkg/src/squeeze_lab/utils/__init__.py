"""
Utilities
"""

from .manifest import ManifestRecorder, RunManifest, load_manifest
from .performance_profiler import PerformanceProfiler
from .validation import ParameterValidator

__all__ = [
    "ManifestRecorder",
    "RunManifest",
    "load_manifest",
    "PerformanceProfiler",
    "ParameterValidator",
]
