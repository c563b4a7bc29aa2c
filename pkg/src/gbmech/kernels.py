"""Backend selection for the enumeration kernels.

The compiled module is used when it imports; ``GBMECH_PURE_PYTHON=1`` forces
the numpy fallback.
"""
from __future__ import annotations

import importlib
import os
from types import ModuleType

from gbmech._kernels_py import KIND_LP, KIND_MAKESPAN, KIND_SUM  # noqa: F401


def load_backend(name: str) -> ModuleType:
    if name == "cython":
        return importlib.import_module("gbmech._kernels")
    if name == "python":
        return importlib.import_module("gbmech._kernels_py")
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    out = []
    for name in ("cython", "python"):
        try:
            load_backend(name)
        except ImportError:
            continue
        out.append(name)
    return out


def _select() -> tuple[str, ModuleType]:
    if os.environ.get("GBMECH_PURE_PYTHON", "") not in ("", "0"):
        return "python", load_backend("python")
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", load_backend("python")


BACKEND, _impl = _select()

star_best_lp = _impl.star_best_lp
star_best_table = _impl.star_best_table
star_lp_leaf_threshold = _impl.star_lp_leaf_threshold
star_oracle = _impl.star_oracle
assign_oracle = _impl.assign_oracle
