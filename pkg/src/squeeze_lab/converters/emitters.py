"""
Data Emitters
CSV and JSON output for trajectories, spectra and reports
Gnuplot-friendly columns, shortest round-trip numbers, LF line endings
"""

import csv
import json
import logging
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from ..core.propagate import Trajectory
from ..core.spectral import SpectrumResult
from ..exceptions import EmitError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TRAJECTORY_HEADER = ("r", "photon_number", "norm_drift")
SPECTRUM_HEADER = ("index", "eigenvalue")

PathLike = Union[str, Path]


def format_number(value: Any) -> str:
    """Shortest decimal that parses back to the same double; integers stay integers"""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def _open_for_write(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def emit_table_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: PathLike) -> Path:
    """Write a header line plus one formatted line per row"""
    path = Path(path)
    try:
        with _open_for_write(path) as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_number(v) for v in row])
    except OSError as e:
        raise EmitError(str(path), e) from e
    logger.info("wrote %s", path)
    return path


def emit_trajectory_csv(t: Trajectory, path: PathLike) -> Path:
    """Columns r, photon_number, norm_drift"""
    rows = zip(t.r_grid, t.photon_number, t.norm_drift)
    return emit_table_csv(TRAJECTORY_HEADER, rows, path)


def emit_spectrum_csv(s: SpectrumResult, path: PathLike) -> Path:
    """Columns index, eigenvalue in ascending order"""
    rows = ((i, value) for i, value in enumerate(s.eigenvalues))
    return emit_table_csv(SPECTRUM_HEADER, rows, path)


def _jsonable(value: Any) -> Any:
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    if is_dataclass(value) and not isinstance(value, type):
        return _jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if hasattr(value, "value") and hasattr(value, "name"):  # Enum
        return value.value
    return value


def emit_report_json(report: Any, path: PathLike, kind: str = "") -> Path:
    """Write a report as schema-versioned JSON"""
    path = Path(path)
    document = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind or type(report).__name__,
        "report": _jsonable(report),
    }
    try:
        with _open_for_write(path) as f:
            json.dump(document, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise EmitError(str(path), e) from e
    logger.info("wrote %s", path)
    return path


def read_table_csv(path: PathLike) -> Tuple[List[str], List[List[str]]]:
    """Header and raw string rows of an emitted CSV"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        return [], []
    return rows[0], rows[1:]


def read_trajectory_csv(path: PathLike) -> Trajectory:
    header, rows = read_table_csv(path)
    if tuple(header) != TRAJECTORY_HEADER:
        raise EmitError(str(path), ValueError(f"unexpected header {header}"))
    if not rows:
        return Trajectory.empty()
    data = np.array(rows, dtype=float)
    return Trajectory(data[:, 0], data[:, 1], data[:, 2], label=Path(path).stem)


def read_spectrum_csv(path: PathLike) -> SpectrumResult:
    header, rows = read_table_csv(path)
    if tuple(header) != SPECTRUM_HEADER:
        raise EmitError(str(path), ValueError(f"unexpected header {header}"))
    return SpectrumResult(np.array([float(row[1]) for row in rows]), label=Path(path).stem)


def read_report_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
