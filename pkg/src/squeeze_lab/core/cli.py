"""
Command-Line Front End
squeeze-lab subcommands: propagate, spectrum, fit, parity, sweep, probe-sa, preset
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .. import __version__
from ..config import AppConfig, configure_logging
from ..converters.emitters import (
    emit_report_json,
    emit_spectrum_csv,
    emit_table_csv,
    emit_trajectory_csv,
)
from ..exceptions import ConfigError, NoFlipError, SpecError, SqueezeLabError
from ..managers.batch_operations import log_progress
from ..managers.experiments import kerr_sweep, parity_experiment, threshold_detect
from ..managers.presets import FIGURES, expand_preset, plan_counts, run_preset
from ..utils.manifest import ManifestRecorder
from ..utils.performance_profiler import PerformanceProfiler
from ..utils.validation import ParameterValidator
from .operators import KerrSpec, TruncationSpec, build_hamiltonian
from .propagate import PropagationConfig, propagate_spec
from .sa_probe import classify, critical_scan, flip_bracket
from .spectral import (
    fit_power_law,
    interleaved_fit,
    spectrum,
    symmetry_defect,
    vacuum_weights,
    zero_modes,
)

logger = logging.getLogger(__name__)

PROG = "squeeze-lab"
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# CLI flags forwarded into AppConfig
_CONFIG_FLAGS = {"dr": "dr", "r_max": "r_max", "method": "method", "jobs": "jobs",
                 "log_level": "log_level"}


def _integer(text: str) -> int:
    """Integer that may be written in scientific notation (1e6)"""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer: '{text}'")
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"invalid integer: '{text}'")
    return int(value)


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list: '{text}'")


def _int_list(text: str) -> List[int]:
    return [_integer(part) for part in text.split(",") if part.strip()]


def _shared_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--n", type=_integer, help="squeezing order")
    shared.add_argument("--dim", type=_integer, help="truncation dimension N")
    shared.add_argument("--kerr-order", type=_integer, choices=(2, 4), help="Kerr order h")
    shared.add_argument("--kerr", type=float, help="Kerr strength (K, or K_4 for h=4)")
    shared.add_argument("--r-max", type=float, help="final squeezing parameter")
    shared.add_argument("--dr", type=float, help="grid step")
    shared.add_argument("--method", choices=("spectral", "chebyshev", "powering", "auto"))
    shared.add_argument("--out", help="output file (or directory for preset)")
    shared.add_argument("--jobs", type=_integer, help="worker pool size")
    shared.add_argument("--full", action="store_true", help="full-scale dimensions")
    return shared


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Generalized squeezing numerics")
    parser.add_argument("--config", help="flat JSON key-value config file")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _shared_flags()

    p = sub.add_parser("propagate", parents=[shared], help="vacuum photon-number trajectory")
    p.add_argument("--record-states", action="store_true", help="also save states (.npy)")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("spectrum", parents=[shared], help="eigenvalues of the truncation")
    p.add_argument("--vectors", action="store_true", help="also write vacuum weights")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fit", parents=[shared], help="power-law fit of central eigenvalues")
    p.add_argument("--j-min", type=_integer)
    p.add_argument("--j-max", type=_integer)
    p.add_argument("--interleave", action="store_true", help="also fit the N, N+1 merge")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("parity", parents=[shared], help="even/odd truncation comparison")
    p.set_defaults(func=cmd_parity)

    p = sub.add_parser("sweep", parents=[shared], help="Kerr-strength sweep and threshold")
    p.add_argument("--strengths", type=_float_list, help="comma-separated strengths")
    p.add_argument("--dims", type=_int_list, help="comma-separated dimensions")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("probe-sa", parents=[shared], help="self-adjointness probe")
    p.add_argument("--depth", type=_integer, help="recurrence depth")
    p.add_argument("--strengths", type=_float_list, help="scan strengths (n = 2h only)")
    p.set_defaults(func=cmd_probe_sa)

    p = sub.add_parser("preset", parents=[shared], help="reproduce a figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--dry-run", action="store_true", help="list planned runs only")
    p.set_defaults(func=cmd_preset)
    return parser


def _require(args: argparse.Namespace, *names: str):
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigError(f"--{name.replace('_', '-')} is required for {args.command}",
                              token=args.command)


def _kerr(args: argparse.Namespace) -> Optional[KerrSpec]:
    if args.kerr is None and args.kerr_order is None:
        return None
    if args.kerr_order is None:
        raise ConfigError("--kerr needs --kerr-order", token=str(args.kerr))
    return KerrSpec(args.kerr_order, 0.0 if args.kerr is None else args.kerr)


def _spec(args: argparse.Namespace, dim: Optional[int] = None) -> TruncationSpec:
    _require(args, "n")
    dim = args.dim if dim is None else dim
    if dim is None:
        raise ConfigError(f"--dim is required for {args.command}", token=args.command)
    return TruncationSpec(args.n, dim, _kerr(args))


def _load_config(args: argparse.Namespace) -> AppConfig:
    config = AppConfig.from_file(args.config) if args.config else AppConfig()
    config = AppConfig.from_env(config)
    overrides = {key: getattr(args, flag, None) for flag, key in _CONFIG_FLAGS.items()}
    return config.merged(**overrides)


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _resolve_out(config: AppConfig, out: str) -> Path:
    path = Path(out)
    return path if path.is_absolute() else config.out_path / path


class _Run:
    """Manifest and profiler for one subcommand invocation"""

    def __init__(self, args: argparse.Namespace, config: AppConfig, out_dir: Path):
        parameters = _parameters(args)
        parameters.update({f"config_{k}": v for k, v in config.to_dict().items()})
        self.recorder = ManifestRecorder(args.command, parameters, out_dir)
        self.profiler = PerformanceProfiler()
        self.profiler.start_timer(args.command)
        self.command = args.command

    def record(self, path: Path) -> Path:
        return self.recorder.record(path)

    def finish(self) -> Path:
        self.profiler.end_timer(self.command)
        self.recorder.add_parameters(**self.profiler.generate_report().to_parameters())
        return self.recorder.finish()


def cmd_propagate(args: argparse.Namespace, config: AppConfig) -> int:
    spec = _spec(args)
    cfg = PropagationConfig(r_max=config.r_max, dr=config.dr, method=config.method,
                            record_states=args.record_states)
    out = _resolve_out(config, args.out or f"{spec.label()}.csv")
    run = _Run(args, config, out.parent)
    t = propagate_spec(spec, cfg, config)
    run.record(emit_trajectory_csv(t, out))
    if args.record_states and t.states is not None:
        states_path = out.with_suffix(".npy")
        np.save(states_path, t.states)
        run.record(states_path)
    run.finish()
    print(f"{spec.label()}: {len(t)} points, max photon number {t.max_photon:.6g}, "
          f"max norm drift {t.max_norm_drift:.3g} ({t.method})")
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace, config: AppConfig) -> int:
    spec = _spec(args)
    out = _resolve_out(config, args.out or f"{spec.label()}_spectrum.csv")
    run = _Run(args, config, out.parent)
    s = spectrum(build_hamiltonian(spec), want_vectors=args.vectors, label=spec.label())
    run.record(emit_spectrum_csv(s, out))
    if args.vectors:
        rows = zip(range(s.dim), s.eigenvalues, vacuum_weights(s))
        run.record(emit_table_csv(("index", "eigenvalue", "vacuum_weight"), rows,
                                  out.with_name(f"{out.stem}_vacuum.csv")))
    run.finish()
    print(f"{spec.label()}: {s.dim} eigenvalues, {len(zero_modes(s, config))} zero modes, "
          f"symmetry defect {symmetry_defect(s):.3g}")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace, config: AppConfig) -> int:
    spec = _spec(args)
    out = _resolve_out(config, args.out or f"{spec.label()}_fit.json")
    run = _Run(args, config, out.parent)
    s = spectrum(build_hamiltonian(spec), label=spec.label())
    fits: Dict[str, Any] = {"direct": fit_power_law(s, args.j_min, args.j_max, config)}
    if args.interleave:
        neighbour = spectrum(build_hamiltonian(spec.with_dim(spec.dim + 1)))
        j_min = None if args.j_min is None else 2 * args.j_min
        j_max = None if args.j_max is None else 2 * args.j_max
        fits["interleaved"] = interleaved_fit(s, neighbour, j_min, j_max, config)
    run.record(emit_report_json(fits, out, kind="power_law_fit"))
    run.finish()
    for name, fit in fits.items():
        print(f"{name}: gamma = {fit.gamma:.4f}, alpha = {fit.alpha:.4g}, "
              f"r^2 = {fit.r_squared:.6f}, window {fit.index_range}")
    return EXIT_OK


def cmd_parity(args: argparse.Namespace, config: AppConfig) -> int:
    _require(args, "n", "dim")
    out = _resolve_out(config, args.out or f"parity_n{args.n}_N{args.dim}.json")
    run = _Run(args, config, out.parent)
    report = parity_experiment(args.n, args.dim, config.r_max, _kerr(args), args.full, config,
                               progress_callback=log_progress)
    for dim, t in sorted(report.trajectories.items()):
        run.record(emit_trajectory_csv(t, out.with_name(f"{out.stem}_N{dim}.csv")))
    run.record(emit_report_json(report, out, kind="parity"))
    run.finish()
    for key, value in report.pair_distance.items():
        print(f"{key}: {value:.6g}")
    for dim, value in report.max_photon.items():
        print(f"max photon N={dim}: {value:.6g}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: AppConfig) -> int:
    _require(args, "n", "kerr_order", "strengths")
    dims = args.dims or ([args.dim, args.dim + 1] if args.dim else None)
    if not dims:
        raise ConfigError("--dims is required for sweep", token="sweep")
    out = _resolve_out(config, args.out or f"sweep_n{args.n}_h{args.kerr_order}.json")
    run = _Run(args, config, out.parent)
    report = kerr_sweep(args.n, args.kerr_order, args.strengths, dims, config.r_max, config,
                        progress_callback=log_progress)
    try:
        threshold = threshold_detect(report)
    except NoFlipError as e:
        logger.warning("%s", e)
        threshold = None
    for (k, dim), t in sorted(report.trajectories.items()):
        run.record(emit_trajectory_csv(t, out.with_name(f"{out.stem}_K{k:g}_N{dim}.csv")))
    run.record(emit_report_json({"sweep": report, "threshold": threshold}, out, kind="sweep"))
    run.finish()
    for k in report.strengths:
        state = "regulated" if report.regulated[k] else "not regulated"
        print(f"K={k:g}: {state}")
    if threshold is not None:
        print(f"threshold {threshold.value:.6g} in {threshold.bracket}, "
              f"dominance estimate {threshold.analytic:.4g}")
    return EXIT_OK


def cmd_probe_sa(args: argparse.Namespace, config: AppConfig) -> int:
    _require(args, "n")
    out = _resolve_out(config, args.out) if args.out else None
    run = _Run(args, config, out.parent if out else config.out_path)
    if args.strengths:
        _require(args, "kerr_order")
        results = critical_scan(args.n, args.kerr_order, args.strengths, args.depth, config)
        for k, result in zip(args.strengths, results):
            print(f"K={k:g}: {result.describe()}")
        bracket = flip_bracket(args.strengths, results)
        print(f"flip bracketed in {bracket}" if bracket else "no verdict flip in scan")
        document: Any = {"classifications": results, "flip_bracket": bracket}
    else:
        result = classify(TruncationSpec(args.n, 1, _kerr(args)), args.depth, config)
        print(result.describe())
        document = result
    if out:
        run.record(emit_report_json(document, out, kind="sa_probe"))
    run.finish()
    return EXIT_OK


def cmd_preset(args: argparse.Namespace, config: AppConfig) -> int:
    if args.dry_run:
        plans = expand_preset(args.figure, args.full, config)
        for plan in plans:
            print(f"{plan.kind:10s} {plan.name}")
        counts = ", ".join(f"{v} {k}" for k, v in sorted(plan_counts(plans).items()))
        print(f"{args.figure}: {len(plans)} runs ({counts})")
        return EXIT_OK
    out_dir = _resolve_out(config, args.out or args.figure)
    run = _Run(args, config, out_dir)
    written = run_preset(args.figure, out_dir, args.full, config, record=run.record,
                         progress_callback=log_progress)
    manifest = run.finish()
    print(f"{args.figure}: wrote {len(written)} files, manifest {manifest}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns 0 on success, 2 on usage errors, 1 on computation errors"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    try:
        config = _load_config(args)
        configure_logging(config.log_level)
        report = ParameterValidator(config).validate(_parameters(args))
        for warning in report["warnings"]:
            logger.warning("%s (%s)", warning["message"], warning["token"])
        if not report["passed"]:
            for error in report["errors"]:
                print(f"{PROG}: error: {error['message']}: '{error['token']}'", file=sys.stderr)
            return EXIT_USAGE
        return args.func(args, config)
    except (ConfigError, SpecError) as e:
        token = getattr(e, "token", None)
        suffix = f" (at '{token}')" if token else ""
        print(f"{PROG}: error: {e}{suffix}", file=sys.stderr)
        return EXIT_USAGE
    except SqueezeLabError as e:
        print(f"{PROG}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:  # last resort: report, never traceback at the user
        logger.exception("unexpected failure")
        print(f"{PROG}: unexpected error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
