"""
Application Configuration
Tunable defaults, config-file loading and logging setup
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from .exceptions import ConfigError

OUT_DIR_ENV = "SQUEEZE_LAB_OUT_DIR"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass(frozen=True)
class AppConfig:
    """Defaults for every run; flags override file values, file values override these"""
    # Propagation
    dr: float = 0.01
    r_max: float = 2.0
    method: str = "auto"
    auto_spectral_max_dim: int = 4096
    powering_max_dim: int = 8192
    chebyshev_max_terms: int = 20000
    chebyshev_margin: float = 0.05

    # Spectra
    zero_tol: float = 1e-9
    chiral_zero_tol: float = 1e-15
    fit_j_min: int = 5
    fit_j_max_fraction: float = 0.05

    # Experiments
    agreement_rel_tol: float = 1e-2
    agreement_abs_floor: float = 1e-3
    desk_large_factor: int = 4
    full_large_factor: int = 10

    # Self-adjointness probe
    sa_block_ratio: float = 0.95
    sa_default_depth: int = 200000

    # Runtime
    jobs: int = 1
    out_dir: str = "."
    log_level: str = "INFO"

    @classmethod
    def from_file(cls, path: str) -> "AppConfig":
        """Load a flat JSON key-value file on top of the defaults"""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {path}: {e}", token=path) from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a flat JSON object", token=path)
        return cls().merged(**data)

    @classmethod
    def from_env(cls, base: Optional["AppConfig"] = None) -> "AppConfig":
        """Apply environment overrides (output root only)"""
        config = base or cls()
        out_dir = os.environ.get(OUT_DIR_ENV)
        if out_dir:
            config = config.merged(out_dir=out_dir)
        return config

    def merged(self, **overrides: Any) -> "AppConfig":
        """Return a copy with overrides applied; None values are ignored"""
        known = {f.name: f for f in fields(self)}
        changes: Dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"unknown configuration key '{key}'", token=key)
            default = getattr(self, key)
            try:
                changes[key] = type(default)(value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"invalid value for '{key}': {value!r}", token=str(value)) from e
        config = replace(self, **changes)
        config.check()
        return config

    def check(self):
        """Reject values that make no sense"""
        if self.dr <= 0 or self.r_max <= 0:
            raise ConfigError("dr and r_max must be positive", token=f"{self.dr},{self.r_max}")
        if self.method not in ("spectral", "chebyshev", "powering", "auto"):
            raise ConfigError(f"unknown method '{self.method}'", token=self.method)
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1", token=str(self.jobs))
        if not 0 < self.sa_block_ratio < 1:
            raise ConfigError("sa_block_ratio must lie in (0, 1)", token=str(self.sa_block_ratio))

    @property
    def out_path(self) -> Path:
        return Path(self.out_dir)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def configure_logging(level: str = "INFO"):
    """Install a single stderr handler on the package logger"""
    logger = logging.getLogger("squeeze_lab")
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ConfigError(f"unknown log level '{level}'", token=level)
    logger.setLevel(numeric)
    if not any(getattr(h, "_squeeze_lab", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._squeeze_lab = True
        logger.addHandler(handler)
