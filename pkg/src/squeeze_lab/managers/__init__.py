"""
Managers for batch runs, trajectory comparison, experiments and figure presets
"""

from .batch_operations import BatchOperationManager
from .comparison import TrajectoryComparator, TrajectoryDiff, sup_distance
from .experiments import (
    ParityReport,
    SweepReport,
    ThresholdEstimate,
    kerr_sweep,
    parity_experiment,
    threshold_detect,
    variable_k_panel,
)
from .presets import FIGURES, expand_preset, run_preset

__all__ = [
    "BatchOperationManager",
    "TrajectoryComparator",
    "TrajectoryDiff",
    "sup_distance",
    "ParityReport",
    "SweepReport",
    "ThresholdEstimate",
    "kerr_sweep",
    "parity_experiment",
    "threshold_detect",
    "variable_k_panel",
    "FIGURES",
    "expand_preset",
    "run_preset",
]
