"""
Figure Presets
Expand a figure id into planned runs, execute them on the worker pool and emit
one file per curve
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..config import AppConfig
from ..converters.emitters import (
    emit_report_json,
    emit_spectrum_csv,
    emit_table_csv,
    emit_trajectory_csv,
)
from ..core.operators import KerrSpec, TruncationSpec, build_hamiltonian
from ..core.propagate import PropagationConfig, propagate_spec
from ..core.spectral import (
    extrapolate_smallest,
    fit_power_law,
    interleaved_fit,
    largest_eigenvalue_scaling,
    smallest_positive_vs_dim,
    spectrum,
)
from ..exceptions import ConfigError
from .batch_operations import BatchOperationManager, ProgressCallback
from .experiments import parity_dims

logger = logging.getLogger(__name__)

FIGURES = tuple(f"fig{i}" for i in range(1, 10))
BASE_N = 1000

# Kerr panels: (n, order, strengths)
KERR_PANELS = {
    "fig3": [(3, 2, (1e-3, 1e-2, 1e-1, 1.0))],
    "fig4": [(3, 4, (1e-9, 1e-8, 1e-7, 1e-6))],
    "fig5": [(4, 4, (1e-6, 1e-5)), (4, 2, (1.0, 1.5, 2.0, 3.0))],
}
VARIABLE_K_PANELS = [
    (3, 2, tuple(round(0.1 * k, 1) for k in range(2, 10))),
    (3, 4, tuple(k * 1e-6 for k in range(2, 10))),
    (4, 4, tuple(k * 1e-5 for k in range(2, 10))),
    (4, 2, tuple(round(2.0 + 0.1 * k, 1) for k in range(2, 10))),
]
SMALL_EIGENVALUE_DIMS = (100, 200, 400, 800, 1600)
SCALING_DIMS = (200, 400, 800, 1600, 3200)
FULL_EXTRA_DIMS = (6400, 12800)


@dataclass(frozen=True)
class RunPlan:
    """One planned computation of a preset"""
    kind: str
    name: str
    params: Dict[str, Any] = field(default_factory=dict, hash=False)

    def spec(self) -> TruncationSpec:
        kerr = None
        if self.params.get("kerr_order") is not None:
            kerr = KerrSpec(self.params["kerr_order"], self.params["kerr"])
        return TruncationSpec(self.params["n"], self.params["dim"], kerr)


def _trajectory(name: str, n: int, dim: int, order: Optional[int] = None,
                strength: Optional[float] = None) -> RunPlan:
    return RunPlan("trajectory", name, {"n": n, "dim": dim, "kerr_order": order, "kerr": strength})


def _kerr_tag(order: int, strength: float) -> str:
    return f"h{order}_K{strength:g}"


def expand_preset(figure_id: str, full: bool = False,
                  config: Optional[AppConfig] = None) -> List[RunPlan]:
    """Planned runs of a figure; desk-scale dims unless full"""
    config = config or AppConfig()
    if figure_id not in FIGURES:
        raise ConfigError(f"unknown figure id '{figure_id}' (expected fig1..fig9)", token=figure_id)
    plans: List[RunPlan] = []
    dims = parity_dims(BASE_N, full, config)
    small_dims = SMALL_EIGENVALUE_DIMS + (FULL_EXTRA_DIMS if full else ())
    scaling_dims = SCALING_DIMS + (FULL_EXTRA_DIMS if full else ())

    if figure_id == "fig1":
        plans = [_trajectory(f"fig1_n{n}_N{d}", n, d) for n in range(3, 7) for d in dims]
    elif figure_id == "fig2":
        for n in range(1, 5):
            plans += [RunPlan("spectrum", f"fig2_n{n}_N{d}", {"n": n, "dim": d})
                      for d in (BASE_N, BASE_N + 1)]
        plans += [RunPlan("fit", f"fig2_fit_n{n}", {"n": n, "dim": BASE_N}) for n in range(1, 5)]
    elif figure_id in KERR_PANELS:
        for n, order, strengths in KERR_PANELS[figure_id]:
            plans += [_trajectory(f"{figure_id}_n{n}_{_kerr_tag(order, k)}_N{d}", n, d, order, k)
                      for k in strengths for d in dims]
    elif figure_id == "fig6":
        for n, order, strengths in VARIABLE_K_PANELS:
            plans += [_trajectory(f"fig6_n{n}_{_kerr_tag(order, k)}_N{BASE_N}", n, BASE_N, order, k)
                      for k in strengths]
    elif figure_id == "fig7":
        plans = [RunPlan("smallest", f"fig7_n{n}", {"n": n, "dims": small_dims, "count": 10})
                 for n in range(1, 5)]
    elif figure_id == "fig8":
        plans = [RunPlan("scaling", f"fig8_n{n}", {"n": n, "dims": scaling_dims})
                 for n in range(1, 5)]
    else:
        plans = [RunPlan("asymptote", f"fig9_n{n}", {"n": n, "dims": small_dims})
                 for n in range(1, 5)]
    return plans


def _compute(plan: RunPlan, config: AppConfig) -> Any:
    """Result object of one plan; pure, so plans can run concurrently"""
    p = plan.params
    if plan.kind == "trajectory":
        return propagate_spec(plan.spec(), PropagationConfig.from_app_config(config), config)
    if plan.kind == "spectrum":
        return spectrum(build_hamiltonian(plan.spec()), label=plan.name)
    if plan.kind == "fit":
        even = spectrum(build_hamiltonian(TruncationSpec(p["n"], p["dim"])))
        odd = spectrum(build_hamiltonian(TruncationSpec(p["n"], p["dim"] + 1)))
        return {"n": p["n"], "dims": [p["dim"], p["dim"] + 1],
                "even": fit_power_law(even, config=config), "odd": fit_power_law(odd, config=config),
                "interleaved": interleaved_fit(even, odd, config=config)}
    if plan.kind == "smallest":
        return smallest_positive_vs_dim(p["n"], p["dims"], p["count"], config)
    if plan.kind == "scaling":
        return largest_eigenvalue_scaling(p["n"], p["dims"])
    if plan.kind == "asymptote":
        track = smallest_positive_vs_dim(p["n"], p["dims"], 1, config)
        return track, extrapolate_smallest(track.dims, track.values[:, 0])
    raise ConfigError(f"unknown plan kind '{plan.kind}'", token=plan.kind)


def _emit(plan: RunPlan, result: Any, out_dir: Path) -> List[Path]:
    if plan.kind == "trajectory":
        return [emit_trajectory_csv(result, out_dir / f"{plan.name}.csv")]
    if plan.kind == "spectrum":
        return [emit_spectrum_csv(result, out_dir / f"{plan.name}.csv")]
    if plan.kind == "fit":
        return [emit_report_json(result, out_dir / f"{plan.name}.json", kind="power_law_fit")]
    if plan.kind == "smallest":
        header = ["dim"] + [f"e{k + 1}" for k in range(result.values.shape[1])]
        rows = [[d] + list(row) for d, row in zip(result.dims, result.values)]
        return [emit_table_csv(header, rows, out_dir / f"{plan.name}.csv")]
    if plan.kind == "scaling":
        header = ["dim", "largest", "three_quarter", "eleven_twentieth"]
        v = result.values
        rows = [[d, a, b, c] for d, a, b, c in zip(result.dims, v["largest"], v["three_quarter"],
                                                   v["eleven_twentieth"])]
        return [emit_table_csv(header, rows, out_dir / f"{plan.name}.csv"),
                emit_report_json(result.tracks, out_dir / f"{plan.name}_fit.json",
                                 kind="eigenvalue_scaling")]
    track, asymptote = result
    rows = [[d, v] for d, v in zip(track.dims, track.values[:, 0])]
    return [emit_table_csv(["dim", "smallest_positive"], rows, out_dir / f"{plan.name}.csv"),
            emit_report_json(asymptote, out_dir / f"{plan.name}_asymptote.json",
                             kind="smallest_eigenvalue_asymptote")]


def run_preset(figure_id: str, out_dir: Path, full: bool = False,
               config: Optional[AppConfig] = None,
               record: Optional[Callable[[Path], Path]] = None,
               progress_callback: Optional[ProgressCallback] = None) -> List[Path]:
    """
    Execute every plan of a figure and write its files

    Computation runs on the worker pool; files are written afterwards by this
    thread alone, in plan order.
    """
    config = config or AppConfig()
    plans = expand_preset(figure_id, full, config)
    logger.info("%s: %d planned runs", figure_id, len(plans))
    tasks = {i: (lambda plan=plan: _compute(plan, config)) for i, plan in enumerate(plans)}
    results = BatchOperationManager(config.jobs).run(tasks, progress_callback)
    written: List[Path] = []
    for i, plan in enumerate(plans):
        for path in _emit(plan, results[i], Path(out_dir)):
            written.append(record(path) if record else path)
    return written


def plan_counts(plans: List[RunPlan]) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for plan in plans:
        counts[plan.kind] = counts.get(plan.kind, 0) + 1
    return counts


def preset_summary(figure_id: str, full: bool = False) -> Tuple[int, Dict[str, int]]:
    plans = expand_preset(figure_id, full)
    return len(plans), plan_counts(plans)
