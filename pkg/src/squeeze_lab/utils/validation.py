"""
Parameter Validation
Checks run parameters before any computation starts
"""

from typing import Any, Dict, List

from ..config import AppConfig
from ..core.operators import KERR_ORDERS
from ..core.sa_probe import MIN_DEPTH, STABLE_DEPTH

# Dense eigenvectors above this size take gigabytes
_LARGE_DIM = 12000


class ParameterValidator:
    """Validates CLI parameter sets and reports problems without raising"""

    def __init__(self, config: AppConfig = None):
        self.config = config or AppConfig()

    def validate(self, params: Dict[str, Any]) -> Dict:
        """
        Validate a parameter set

        Returns:
            Dict with 'passed', 'errors', 'warnings', 'info' keys; each error and
            warning carries 'message' and the offending 'token'
        """
        errors: List[Dict] = []
        warnings: List[Dict] = []
        info: List[Dict] = []

        def error(message: str, token: Any):
            errors.append({"message": message, "token": str(token)})

        def warn(message: str, token: Any):
            warnings.append({"message": message, "token": str(token)})

        n = params.get("n")
        if n is not None and (int(n) != n or n < 1):
            error("--n must be an integer >= 1", n)

        dims = list(params.get("dims") or [])
        if params.get("dim") is not None:
            dims.append(params["dim"])
        for dim in dims:
            if int(dim) != dim or dim < 1:
                error("dimensions must be integers >= 1", dim)
            elif dim > _LARGE_DIM:
                warn(f"dim={dim} needs dense eigenvectors of {dim}x{dim}", dim)

        order = params.get("kerr_order")
        strength = params.get("kerr")
        if order is not None and order not in KERR_ORDERS:
            error(f"--kerr-order must be one of {KERR_ORDERS}", order)
        if strength is not None and strength < 0:
            error("--kerr must be >= 0", strength)
        if strength is not None and order is None:
            error("--kerr needs --kerr-order", strength)
        for k in params.get("strengths") or []:
            if k < 0:
                error("strengths must be >= 0", k)

        for key in ("r_max", "dr"):
            value = params.get(key)
            if value is not None and not value > 0:
                error(f"--{key.replace('_', '-')} must be positive", value)

        method = params.get("method")
        if method == "powering":
            for dim in dims:
                if dim > self.config.powering_max_dim:
                    error(f"powering refused above dim={self.config.powering_max_dim}", dim)

        depth = params.get("depth")
        if depth is not None:
            if depth < MIN_DEPTH:
                warn(f"depth below {MIN_DEPTH} yields an inconclusive verdict", depth)
            elif depth < STABLE_DEPTH:
                warn(f"depth below {STABLE_DEPTH} is not checked for depth stability", depth)

        jobs = params.get("jobs")
        if jobs is not None and jobs < 1:
            error("--jobs must be >= 1", jobs)

        if params.get("full"):
            info.append({"message": "full-scale dimensions requested", "token": "--full"})

        return {
            "passed": not errors,
            "errors": errors,
            "warnings": warnings,
            "info": info,
        }
