"""Atomic CSV/JSON writers (17 significant digits, temp file + rename)."""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .grid import write_columns


def _atomic(path: Path, writer) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Union[str, Path], columns: Dict[str, np.ndarray]) -> Path:
    path = Path(path)
    _atomic(path, lambda tmp: write_columns(tmp, columns))
    return path


def jsonable(value):
    """Floats with 17 significant digits; non-finite numbers become strings."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return repr(v)
        return float(format(v, ".17g"))
    return value


def write_json(path: Union[str, Path], payload: dict) -> Path:
    path = Path(path)

    def _w(tmp):
        with open(tmp, "w") as fh:
            json.dump(jsonable(payload), fh, indent=2, sort_keys=True)
            fh.write("\n")

    _atomic(path, _w)
    return path


def transform_columns(out) -> Dict[str, np.ndarray]:
    return {"x": out.grid.x, "V1": out.V1.values, "V3": out.V3.values,
            "psi_hat": out.psi_hat.values, "residual": out.residual.values}


def transform_sidecar(out, gamma_paper: Optional[float]) -> dict:
    return {
        "gamma_engine": out.gamma,
        "gamma_paper": gamma_paper,
        "C1": out.C1,
        "C2": out.C2,
        "lambda": out.lam,
        "epsilon": out.energy,
        "singular_intervals": [list(iv) for iv in out.singular_intervals()],
        "residual_sup": out.residual_sup,
    }
