"""
Run Manifests
Records command, parameters, timings and content hashes of every output file
"""

import hashlib
import json
import logging
import threading
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..exceptions import EmitError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def file_hash(path: Union[str, Path]) -> str:
    """sha256 of a file's bytes"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class OutputRecord:
    """One emitted file"""
    path: str
    sha256: str


@dataclass
class RunManifest:
    """Everything needed to reproduce one CLI run"""
    command: str
    parameters: Dict[str, Any]
    tool_version: str
    started: str = field(default_factory=_now)
    finished: Optional[str] = None
    outputs: List[OutputRecord] = field(default_factory=list)
    seedless: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ManifestRecorder:
    """Serialized writer: hashes each output as it lands and saves the manifest last"""

    def __init__(self, command: str, parameters: Dict[str, Any], out_dir: Union[str, Path],
                 tool_version: Optional[str] = None):
        if tool_version is None:
            from .. import __version__ as tool_version
        self.out_dir = Path(out_dir)
        self.manifest = RunManifest(command, dict(parameters), tool_version)
        self._lock = threading.Lock()

    def record(self, path: Union[str, Path]) -> Path:
        """Add a written file; paths inside out_dir are stored relative to it"""
        path = Path(path)
        try:
            shown = str(path.resolve().relative_to(self.out_dir.resolve()))
        except ValueError:
            shown = str(path)
        with self._lock:
            self.manifest.outputs.append(OutputRecord(shown, file_hash(path)))
        return path

    def add_parameters(self, **values: Any):
        with self._lock:
            self.manifest.parameters.update(values)

    def finish(self) -> Path:
        """Stamp the finish time and write manifest.json into out_dir"""
        self.manifest.finished = _now()
        path = self.out_dir / MANIFEST_NAME
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                json.dump(self.manifest.to_dict(), f, indent=2, sort_keys=True, default=str)
                f.write("\n")
        except OSError as e:
            raise EmitError(str(path), e) from e
        logger.info("manifest %s lists %d outputs", path, len(self.manifest.outputs))
        return path


def load_manifest(path: Union[str, Path]) -> RunManifest:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    outputs = [OutputRecord(**o) for o in data.pop("outputs", [])]
    return RunManifest(outputs=outputs, **data)
