"""Per-subset offsets ``g_T(ell)`` and tie-breaking orders for Hybrid rules.

A Hybrid rule gives the root the set ``S`` minimising ``r(T) + g_T(ell)``.
Sets are bitmasks over task indices (bit ``j`` is task ``j``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from gbmech._kernels_py import _complement_max, _complement_sums
from gbmech.core import StructuralError


class GFunctionSpec:
    """Base class; subclasses define ``value`` and ``table``."""

    kind: str = "custom"
    #: closed forms exist, so the enumeration limit does not apply
    closed_form: bool = False
    #: known to be a decreasing set function for every ell
    decreasing: bool = False

    def value(self, mask: int, ell: Sequence[float]) -> float:
        raise NotImplementedError

    def table(self, ell: Sequence[float]) -> np.ndarray:
        m = len(ell)
        return np.array([self.value(mask, ell) for mask in range(1 << m)], dtype=float)

    @property
    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class MaxLeaf(GFunctionSpec):
    """``g_T = max_{i not in T} ell_i`` (0 for ``T = M``)."""

    kind = "max"
    closed_form = True
    decreasing = True

    def value(self, mask, ell):
        return max((x for j, x in enumerate(ell) if not (mask >> j) & 1), default=0.0)

    def table(self, ell):
        return _complement_max(np.asarray(ell, dtype=float))


@dataclass(frozen=True)
class LpLeaf(GFunctionSpec):
    """``g_T = (sum_{i not in T} ell_i^p)^(1/p)``."""

    p: float = 2.0
    kind = "lp"
    decreasing = True

    def __post_init__(self):
        if not (self.p > 0) or math.isinf(self.p):
            raise StructuralError("LpLeaf needs a finite p > 0")

    def value(self, mask, ell):
        s = 0.0
        for j, x in enumerate(ell):
            if not (mask >> j) & 1:
                s = s + x ** self.p
        return s ** (1.0 / self.p)

    def table(self, ell):
        return _complement_sums(np.asarray(ell, dtype=float) ** self.p) ** (1.0 / self.p)

    @property
    def label(self):
        return f"lp(p={self.p:g})"


@dataclass(frozen=True)
class SumLeaf(GFunctionSpec):
    """``g_T = sum_{i not in T} ell_i``; the Hybrid rule is then VCG."""

    kind = "sum"
    closed_form = True
    decreasing = True

    def value(self, mask, ell):
        s = 0.0
        for j, x in enumerate(ell):
            if not (mask >> j) & 1:
                s = s + x
        return s

    def table(self, ell):
        return _complement_sums(np.asarray(ell, dtype=float))


class CustomG(GFunctionSpec):
    """Arbitrary offsets from a callable ``fn(mask, ell) -> float``."""

    kind = "custom"

    def __init__(self, fn: Callable[[int, Sequence[float]], float], name: str = "custom",
                 decreasing: bool = False):
        self._fn = fn
        self._name = name
        self.decreasing = decreasing

    def value(self, mask, ell):
        return float(self._fn(mask, tuple(ell)))

    @property
    def label(self):
        return self._name

    def __repr__(self):
        return f"CustomG({self._name!r})"


def _bit_reverse(mask: int, m: int) -> int:
    out = 0
    for j in range(m):
        if (mask >> j) & 1:
            out |= 1 << (m - 1 - j)
    return out


@dataclass(frozen=True)
class TieBreakPolicy:
    """Total order on subsets used among exact minimisers.

    ``root-first`` (default) prefers larger root sets, ``leaf-first`` smaller
    ones; equal sizes go to the lexicographically smallest sorted index list.
    """

    name: str = "root-first"

    def __post_init__(self):
        if self.name not in ("root-first", "leaf-first"):
            raise StructuralError(f"unknown tie-break policy {self.name!r}")

    def rank(self, mask: int, m: int) -> tuple[int, int]:
        """Larger rank wins."""
        size = bin(mask).count("1")
        return (size if self.name == "root-first" else -size, _bit_reverse(mask, m))

    def prefer(self, a: int, b: int, m: int) -> bool:
        return self.rank(a, m) > self.rank(b, m)

    @property
    def is_default(self) -> bool:
        return self.name == "root-first"


DEFAULT_TIE = TieBreakPolicy()


def g_from_name(name: str, p: float | None = None) -> GFunctionSpec:
    if name == "max":
        return MaxLeaf()
    if name == "sum":
        return SumLeaf()
    if name == "lp":
        if p is None:
            raise StructuralError("the lp offset needs p")
        return LpLeaf(p)
    raise StructuralError(f"unknown offset family {name!r}")
