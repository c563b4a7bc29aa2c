"""Hybrid rules on stars: root-set selection, critical values and payments.

Everything here works on plain cost vectors ``r`` (root) and ``ell`` (leaves)
so that hyperstars and star covers can reuse it on derived stars.
"""
from __future__ import annotations

import functools
import math
from typing import Sequence

import numpy as np

from gbmech import kernels
from gbmech._kernels_py import _subset_sums
from gbmech.core import (
    INF,
    Allocation,
    StarInstance,
    StructuralError,
    require_enumerable,
    root_set,
    set_to_mask,
    star_allocation,
)
from gbmech.mechanisms.offsets import (
    DEFAULT_TIE,
    GFunctionSpec,
    LpLeaf,
    MaxLeaf,
    SumLeaf,
    TieBreakPolicy,
)


def _fold(values: Sequence[float], mask: int) -> float:
    s = 0.0
    for j, v in enumerate(values):
        if (mask >> j) & 1:
            s = s + v
    return s


def _best(cands, tie: TieBreakPolicy, m: int, maximize: bool = False):
    """Pick ``(mask, value)`` from ``cands`` by value, then by ``tie``."""
    best_mask, best_val = None, None
    for mask, val in cands:
        if best_val is None:
            better = True
        elif val != best_val:
            better = val > best_val if maximize else val < best_val
        else:
            better = tie.prefer(mask, best_mask, m)
        if better:
            best_mask, best_val = mask, val
    return best_mask, best_val


# -- closed forms -----------------------------------------------------------

def max_leaf_select(r: Sequence[float], ell: Sequence[float]) -> tuple[int, float]:
    """Minimiser of ``r(T) + max_{i not in T} ell_i`` under the default tie order.

    Only root sets of the form ``{i : ell_i > theta}`` (padded with zero-cost
    tasks) and ``M`` itself can win, so it suffices to scan the distinct leaf
    costs in decreasing order. Prefix sums in that order screen the
    candidates; the few near the minimum are re-summed in index order so the
    values agree bit-for-bit with subset enumeration.
    """
    m = len(r)
    full = (1 << m) - 1
    order = sorted(range(m), key=lambda j: (-ell[j], j))
    screened: list[tuple[float, float, int]] = []  # (screen value, theta, group start)
    prefix = 0.0
    pos = 0
    while pos < m:
        theta = ell[order[pos]]
        screened.append((prefix + theta, theta, pos))
        end = pos
        while end < m and ell[order[end]] == theta:
            prefix = prefix + r[order[end]]
            end += 1
        pos = end
    total = _fold(r, full)
    lo = min([total] + [s for s, _, _ in screened])
    if math.isinf(lo):
        return full, INF
    slack = 1e-9 * max(1.0, abs(lo))
    cands = [(full, total)] if total <= lo + slack else []
    for s, theta, _ in screened:
        if s > lo + slack:
            continue
        out = [j for j in range(m) if ell[j] <= theta and r[j] > 0]
        if not any(ell[j] == theta for j in out):
            out.append(max(j for j in range(m) if ell[j] == theta))
        mask = full & ~set_to_mask(out)
        cands.append((mask, _fold(r, mask) + theta))
    return _best(cands, DEFAULT_TIE, m)


def sum_leaf_select(r: Sequence[float], ell: Sequence[float]) -> tuple[int, float]:
    """Per-task minimum (VCG); exact ties go to the root."""
    m = len(r)
    mask = set_to_mask(j for j in range(m) if r[j] <= ell[j])
    val = _fold(r, mask) + _fold(ell, ((1 << m) - 1) & ~mask)
    if math.isinf(val):
        return (1 << m) - 1, INF
    return mask, val


# -- generic selection ------------------------------------------------------

def select_root_set(
    r: Sequence[float],
    ell: Sequence[float],
    g: GFunctionSpec,
    tie: TieBreakPolicy = DEFAULT_TIE,
    maximize: bool = False,
    fix: tuple[int, int] | None = None,
    method: str = "auto",
) -> tuple[int, float]:
    """Best root set and its value.

    ``fix=(i, b)`` restricts to sets with bit ``i`` equal to ``b``.
    ``method`` is ``auto`` (closed forms where available), ``enumerate``
    (always scan all subsets) or ``closed`` (closed form or error).
    Results are memoised on the (immutable) arguments.
    """
    r = tuple(float(x) for x in r)
    ell = tuple(float(x) for x in ell)
    if len(ell) != len(r):
        raise StructuralError("root and leaf cost vectors differ in length")
    if not (method != "enumerate" and _has_closed_form(g, tie, maximize, fix)):
        # checked outside the cache so a lowered limit still applies
        require_enumerable(len(r))
    return _select_cached(r, ell, g, tie, bool(maximize), fix, method)


def _has_closed_form(g, tie, maximize, fix) -> bool:
    return isinstance(g, (MaxLeaf, SumLeaf)) and tie.is_default and not maximize and fix is None


@functools.lru_cache(maxsize=1 << 16)
def _select_cached(r, ell, g, tie, maximize, fix, method):
    m = len(r)
    closed_ok = _has_closed_form(g, tie, maximize, fix)
    if method == "closed" and not closed_ok:
        raise StructuralError(f"no closed form for offset {g.label} with these options")
    if method in ("auto", "closed") and closed_ok:
        return max_leaf_select(r, ell) if isinstance(g, MaxLeaf) else sum_leaf_select(r, ell)
    fix_bit, fix_val = fix if fix is not None else (-1, 0)
    ra = np.asarray(r, dtype=float)
    if tie.is_default:
        if isinstance(g, LpLeaf):
            return kernels.star_best_lp(ra, np.asarray(ell, dtype=float), g.p, maximize, fix_bit, fix_val)
        return kernels.star_best_table(ra, np.ascontiguousarray(g.table(ell), dtype=float),
                                       maximize, fix_bit, fix_val)
    vals = _subset_sums(ra) + g.table(ell)
    masks = range(1 << m)
    if fix is not None:
        masks = [t for t in masks if ((t >> fix_bit) & 1) == fix_val]
    return _best(((t, float(vals[t])) for t in masks), tie, m, maximize)


def hybrid_star_allocate(
    inst: StarInstance,
    g: GFunctionSpec | None = None,
    tie: TieBreakPolicy = DEFAULT_TIE,
    method: str = "auto",
) -> Allocation:
    """Root takes ``S in argmin_T r(T) + g_T(ell)``; the other tasks go to their leaves."""
    g = MaxLeaf() if g is None else g
    mask, _ = select_root_set(inst.root_costs, inst.leaf_costs, g, tie, method=method)
    return star_allocation(inst.m, [j for j in range(inst.m) if (mask >> j) & 1])


def hybrid_star_allocate_fast_max(inst: StarInstance) -> Allocation:
    mask, _ = max_leaf_select(inst.root_costs, inst.leaf_costs)
    return star_allocation(inst.m, [j for j in range(inst.m) if (mask >> j) & 1])


def hybrid_lp_max_allocate(inst: StarInstance, p: float, tie: TieBreakPolicy = DEFAULT_TIE) -> Allocation:
    """Root takes ``S in argmax_T r(T) + (sum_{i not in T} ell_i^p)^(1/p)``."""
    if p < 1:
        raise StructuralError("maximisation needs p >= 1")
    mask, _ = select_root_set(inst.root_costs, inst.leaf_costs, LpLeaf(p), tie, maximize=True)
    return star_allocation(inst.m, [j for j in range(inst.m) if (mask >> j) & 1])


def _lp_norm(values: Sequence[float], p: float) -> float:
    s = 0.0
    for v in values:
        s = s + v ** p
    return s ** (1.0 / p)


def all_or_nothing_allocate(inst: StarInstance, p: float) -> Allocation:
    """Root gets every task iff ``r(M) >= ||ell||_p``, otherwise the leaves get all."""
    if p < 1:
        raise StructuralError("maximisation needs p >= 1")
    take = _fold(inst.root_costs, (1 << inst.m) - 1) >= _lp_norm(inst.leaf_costs, p)
    return star_allocation(inst.m, range(inst.m) if take else ())


def combined_max_mechanism(inst: StarInstance, p: float) -> Allocation:
    """Hybrid argmax rule for ``p <= 2``, All-or-Nothing above."""
    if p <= 2:
        return hybrid_lp_max_allocate(inst, p)
    return all_or_nothing_allocate(inst, p)


# -- critical values ----------------------------------------------------------

def psi_parts(r, ell, g: GFunctionSpec, i: int, tie: TieBreakPolicy = DEFAULT_TIE,
              method: str = "auto") -> tuple[float, float]:
    """``(A, B)``: best value over sets without ``i``, and over sets with ``i`` at ``r_i = 0``."""
    r = [float(x) for x in r]
    m = len(r)
    if not 0 <= i < m:
        raise StructuralError(f"no task {i}")
    r0 = list(r)
    r0[i] = 0.0
    if method == "auto" and isinstance(g, (MaxLeaf, SumLeaf)) and tie.is_default:
        # decreasing offsets: excluding i is what r_i = inf forces, and at
        # r_i = 0 the best set may as well contain i
        rinf = list(r)
        rinf[i] = INF
        a = select_root_set(rinf, ell, g, tie)[1]
        b = select_root_set(r0, ell, g, tie)[1]
        return a, b
    a = select_root_set(r, ell, g, tie, fix=(i, 0), method="enumerate")[1]
    b = select_root_set(r0, ell, g, tie, fix=(i, 1), method="enumerate")[1]
    return a, b


def critical_value(inst: StarInstance, g: GFunctionSpec | None, i: int,
                   tie: TieBreakPolicy = DEFAULT_TIE, method: str = "auto") -> float:
    """Root-side threshold: the root gets task ``i`` below it and loses it above."""
    g = MaxLeaf() if g is None else g
    a, b = psi_parts(inst.root_costs, inst.leaf_costs, g, i, tie, method)
    if math.isinf(a) and math.isinf(b):
        return INF
    return a - b


def _leaf_wins(r, ell, g, tie, i, x, maximize=False) -> bool:
    e = list(ell)
    e[i] = x
    mask, _ = select_root_set(r, e, g, tie, maximize=maximize)
    return not (mask >> i) & 1


def _max_leaf_threshold(r, ell, i, tie) -> float:
    a, b = psi_parts(r, ell, MaxLeaf(), i, tie)
    c = r[i] + b
    if math.isinf(c):
        return INF
    others = [j for j in range(len(r)) if j != i]
    levels = sorted({0.0} | {ell[j] for j in others})
    strict, loose = None, None
    for mu in levels:
        rt = 0.0
        for j in others:
            if ell[j] > mu:
                rt = rt + r[j]
        if rt + mu < c and (strict is None or c - rt > strict):
            strict = c - rt
        if rt + mu <= c and (loose is None or c - rt > loose):
            loose = c - rt
    lo = 0.0 if strict is None else strict
    hi = lo if loose is None else max(lo, loose)
    if hi <= lo:
        return lo
    # on [lo, hi] the best value is flat and ties decide; the winner can only
    # change at leaf costs, so test the breakpoints and the gaps between them
    points = [lo] + sorted({ell[j] for j in others if lo < ell[j] < hi}) + [hi]
    best = lo
    for k in range(1, len(points)):
        mid = 0.5 * (points[k - 1] + points[k])
        if _leaf_wins(r, ell, MaxLeaf(), tie, i, mid) or _leaf_wins(r, ell, MaxLeaf(), tie, i, points[k]):
            best = points[k]
    return best


def _bisect_threshold(r, ell, g, tie, i, maximize=False) -> float:
    """Generic critical leaf bid from the black-box rule (monotone in the bid)."""
    def wins(x):
        return _leaf_wins(r, ell, g, tie, i, x, maximize)

    if maximize:
        # leaf wins for large bids; find inf{x : wins}
        if wins(0.0):
            return 0.0
        hi = 1.0
        while not wins(hi):
            hi *= 2.0
            if hi > 1e12:
                return INF
        lo = 0.0
    else:
        if not wins(0.0):
            return 0.0
        lo, hi = 0.0, 1.0
        while wins(hi):
            lo = hi
            hi *= 2.0
            if hi > 1e12:
                return INF
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if wins(mid) != maximize:
            lo = mid
        else:
            hi = mid
    return hi if maximize else lo


def leaf_threshold(r, ell, g: GFunctionSpec, i: int, tie: TieBreakPolicy = DEFAULT_TIE,
                   maximize: bool = False) -> float:
    """Critical bid of leaf ``i``.

    Cost sense: the supremum of bids at which the leaf still gets its task.
    Value sense: the infimum of bids at which it gets the task.
    """
    return _leaf_threshold_cached(tuple(float(x) for x in r), tuple(float(x) for x in ell), g, i, tie,
                                  bool(maximize))


@functools.lru_cache(maxsize=1 << 16)
def _leaf_threshold_cached(r, ell, g, i, tie, maximize):
    if not tie.is_default or not g.decreasing:
        return _bisect_threshold(r, ell, g, tie, i, maximize)
    if isinstance(g, SumLeaf) and not maximize:
        return r[i]
    if isinstance(g, MaxLeaf) and not maximize:
        return _max_leaf_threshold(r, ell, i, tie)
    if isinstance(g, LpLeaf):
        c = select_root_set(r, ell, g, tie, maximize=maximize, fix=(i, 1), method="enumerate")[1]
        return float(kernels.star_lp_leaf_threshold(
            np.asarray(r, dtype=float), np.asarray(ell, dtype=float), g.p, i, c, maximize))
    return _bisect_threshold(r, ell, g, tie, i, maximize)


def star_hybrid_payments(r, ell, g: GFunctionSpec, mask: int, tie: TieBreakPolicy = DEFAULT_TIE,
                         maximize: bool = False) -> list[float]:
    """Root gets ``g_empty - g_S``; winning leaves get their critical bid, losers 0.

    In value sense the same numbers are charges rather than payments.
    """
    m = len(r)
    out = [0.0] * (m + 1)
    g_empty = g.value(0, ell)
    g_s = g.value(mask, ell)
    out[0] = 0.0 if g_empty == g_s else g_empty - g_s
    for i in range(m):
        if not (mask >> i) & 1:
            out[i + 1] = leaf_threshold(r, ell, g, i, tie, maximize)
    return out


def hybrid_star_payments(inst: StarInstance, alloc: Allocation, g: GFunctionSpec | None = None,
                         tie: TieBreakPolicy = DEFAULT_TIE, maximize: bool = False) -> list[float]:
    g = MaxLeaf() if g is None else g
    mask = set_to_mask(root_set(alloc))
    return star_hybrid_payments(inst.root_costs, inst.leaf_costs, g, mask, tie, maximize)


def all_or_nothing_payments(inst: StarInstance, alloc: Allocation, p: float) -> list[float]:
    """Charges: the root pays ``||ell||_p`` when it wins, each leaf its critical bid."""
    m = inst.m
    out = [0.0] * (m + 1)
    if root_set(alloc):
        out[0] = _lp_norm(inst.leaf_costs, p)
        return out
    rm = _fold(inst.root_costs, (1 << m) - 1)
    for i in range(m):
        s = 0.0
        for j, x in enumerate(inst.leaf_costs):
            if j != i:
                s = s + x ** p
        room = rm ** p - s
        out[i + 1] = room ** (1.0 / p) if room > 0 else 0.0
    return out
