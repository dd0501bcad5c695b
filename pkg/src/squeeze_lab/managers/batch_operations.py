"""
Batch Operations
Run many independent propagation or spectrum jobs on a bounded worker pool
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Dict, Hashable, Optional, Sequence, Tuple

from ..config import AppConfig
from ..core.operators import TruncationSpec
from ..core.propagate import PropagationConfig, Trajectory, propagate_spec

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, str], None]


class BatchOperationManager:
    """Executes keyed jobs concurrently and returns results in sorted key order"""

    def __init__(self, jobs: int = 1):
        self.jobs = max(int(jobs), 1)

    def run(self, tasks: Dict[Hashable, Callable[[], object]],
            progress_callback: Optional[ProgressCallback] = None) -> Dict[Hashable, object]:
        """
        Run every task and collect results

        Tasks share no mutable state. Results are keyed as given and ordered by
        sorted key; if any task fails, the failure of the smallest key is raised
        once all tasks have finished.

        Args:
            tasks: key -> zero-argument callable
            progress_callback: called with (percent, message) after each task
        """
        keys = sorted(tasks)
        total = len(keys)
        results: Dict[Hashable, object] = {}
        failures: Dict[Hashable, Exception] = {}

        if self.jobs == 1 or total <= 1:
            for i, key in enumerate(keys):
                try:
                    results[key] = tasks[key]()
                except Exception as e:  # re-raised below in key order
                    failures[key] = e
                if progress_callback:
                    progress_callback(int(((i + 1) / total) * 100), f"Finished {key}")
        else:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                futures = {pool.submit(tasks[key]): key for key in keys}
                for done, future in enumerate(as_completed(futures), start=1):
                    key = futures[future]
                    try:
                        results[key] = future.result()
                    except Exception as e:  # re-raised below in key order
                        failures[key] = e
                    if progress_callback:
                        progress_callback(int((done / total) * 100), f"Finished {key}")

        if failures:
            first = sorted(failures)[0]
            logger.error("%d of %d jobs failed; first: %s", len(failures), total, first)
            raise failures[first]
        return {key: results[key] for key in keys}

    def batch_propagate(self, specs: Sequence[TruncationSpec], cfg: PropagationConfig,
                        config: Optional[AppConfig] = None,
                        progress_callback: Optional[ProgressCallback] = None
                        ) -> Dict[Tuple[float, int], Trajectory]:
        """Propagate the vacuum for each spec; keys are (Kerr strength, dim)"""
        tasks = {}
        for spec in specs:
            strength = spec.kerr.strength if spec.kerr is not None else 0.0
            tasks[(strength, spec.dim)] = (lambda s=spec: propagate_spec(s, cfg, config))
        return self.run(tasks, progress_callback)


def log_progress(percent: int, message: str):
    """Default progress callback: forward to the module logger"""
    logger.info("[%3d%%] %s", percent, message)
