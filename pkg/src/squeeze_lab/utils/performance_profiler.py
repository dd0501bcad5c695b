"""
Performance Profiling
Wall-clock timers per operation and process memory for run manifests
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List

import psutil


@dataclass
class PerformanceMetric:
    """Single performance metric"""
    name: str
    value: float
    unit: str = "ms"
    timestamp: float = field(default_factory=time.time)


@dataclass
class PerformanceReport:
    """Timings plus resident memory at report time"""
    total_time: float = 0.0
    rss_mb: float = 0.0
    peak_rss_mb: float = 0.0
    metrics: List[PerformanceMetric] = field(default_factory=list)

    def to_parameters(self) -> Dict[str, float]:
        """Flat `timing_*` entries for a manifest"""
        out = {f"timing_{m.name}_ms": round(m.value, 3) for m in self.metrics}
        out["timing_total_ms"] = round(self.total_time, 3)
        out["memory_rss_mb"] = round(self.rss_mb, 1)
        out["memory_peak_rss_mb"] = round(self.peak_rss_mb, 1)
        return out


class PerformanceProfiler:
    """Times named operations and samples process memory"""

    def __init__(self):
        self.metrics: List[PerformanceMetric] = []
        self.start_times: Dict[str, float] = {}
        self._process = psutil.Process()
        self._peak_rss = 0

    def start_timer(self, operation_name: str):
        """Start timing an operation"""
        self.start_times[operation_name] = time.perf_counter()
        self.sample_memory()

    def end_timer(self, operation_name: str) -> float:
        """End timing and return elapsed milliseconds"""
        if operation_name not in self.start_times:
            return 0.0
        elapsed = (time.perf_counter() - self.start_times.pop(operation_name)) * 1000
        self.metrics.append(PerformanceMetric(operation_name, elapsed))
        self.sample_memory()
        return elapsed

    def sample_memory(self) -> int:
        """Current RSS in bytes; keeps the running peak"""
        rss = self._process.memory_info().rss
        self._peak_rss = max(self._peak_rss, rss)
        return rss

    def generate_report(self) -> PerformanceReport:
        rss = self.sample_memory()
        return PerformanceReport(
            total_time=sum(m.value for m in self.metrics),
            rss_mb=rss / (1024 * 1024),
            peak_rss_mb=self._peak_rss / (1024 * 1024),
            metrics=list(self.metrics),
        )

    def clear(self):
        """Clear all metrics"""
        self.metrics.clear()
        self.start_times.clear()
        self._peak_rss = 0
