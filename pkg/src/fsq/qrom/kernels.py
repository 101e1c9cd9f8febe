"""Kernel backend selection: the compiled extension when importable, else numpy.

Set FSQ_PURE_PYTHON=1 to force the numpy path. ``set_backend`` switches at runtime
(benchmarks and backend-equivalence tests).
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS: dict[str, ModuleType] = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

_active: ModuleType = _kernels_py
BACKEND = "python"


def set_backend(name: str) -> None:
    global _active, BACKEND
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    _active = BACKENDS[name]
    BACKEND = name


def get_backend() -> str:
    return BACKEND


set_backend("compiled" if _compiled is not None and os.environ.get("FSQ_PURE_PYTHON") != "1" else "python")


def xor_oracle(states, tables, n_x, n_o, n_y, n_w):
    return _active.xor_oracle(
        np.ascontiguousarray(states, dtype=np.complex128), np.ascontiguousarray(tables, dtype=np.int64), n_x, n_o, n_y, n_w
    )


def project(states, reg_values, targets):
    return _active.project(
        np.ascontiguousarray(states, dtype=np.complex128),
        np.ascontiguousarray(reg_values, dtype=np.int64),
        np.ascontiguousarray(targets, dtype=np.int64),
    )


def masked_norms(states, mask):
    return _active.masked_norms(np.ascontiguousarray(states, dtype=np.complex128), np.ascontiguousarray(mask, dtype=np.uint8))
