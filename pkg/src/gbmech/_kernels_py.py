"""Pure-Python (numpy) implementations of the enumeration kernels.

Same signatures and semantics as the compiled ``_kernels`` module, which is
preferred when it is importable. Every subset sum is a left fold over the
included indices in ascending order starting from ``0.0``; the compiled
kernels keep that order so both backends see the same floating-point values.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

KIND_MAKESPAN = 0
KIND_LP = 1
KIND_SUM = 2

# above this many tasks the star oracle loops over the high bits in Python
_VECTOR_BITS = 20


def _subset_sums(values: np.ndarray) -> np.ndarray:
    table = np.zeros(1)
    for v in values:
        table = np.concatenate((table, table + v))
    return table


def _complement_sums(values: np.ndarray) -> np.ndarray:
    table = np.zeros(1)
    for v in values:
        table = np.concatenate((table + v, table))
    return table


def _complement_max(values: np.ndarray) -> np.ndarray:
    table = np.zeros(1)
    for v in values:
        table = np.concatenate((np.maximum(table, v), table))
    return table


def _popcount(m: int) -> np.ndarray:
    table = np.zeros(1, dtype=np.int64)
    for _ in range(m):
        table = np.concatenate((table, table + 1))
    return table


def _bit_reverse(m: int) -> np.ndarray:
    # rev[mask] puts bit 0 of mask in position m-1
    table = np.zeros(1, dtype=np.int64)
    for j in range(m):
        table = np.concatenate((table, table + (1 << (m - 1 - j))))
    return table


def _pick(values: np.ndarray, maximize: bool, allowed: np.ndarray | None, m: int):
    """Best value, ties to the larger set, then to the lexicographically smaller one."""
    vals = values if allowed is None else np.where(allowed, values, -np.inf if maximize else np.inf)
    best = vals.max() if maximize else vals.min()
    cand = np.flatnonzero(vals == best)
    if allowed is not None:
        cand = cand[allowed[cand]]
    if len(cand) == 1:
        mask = int(cand[0])
    else:
        rank = (_popcount(m)[cand] << m) | _bit_reverse(m)[cand]
        mask = int(cand[int(np.argmax(rank))])
    return mask, float(values[mask])


def _allowed(m: int, fix_bit: int, fix_val: int) -> np.ndarray | None:
    if fix_bit < 0:
        return None
    idx = np.arange(1 << m, dtype=np.int64)
    return ((idx >> fix_bit) & 1) == fix_val


def star_best_lp(r, ell, p, maximize=False, fix_bit=-1, fix_val=0):
    """Best root set for ``r(T) + (sum_{i not in T} ell_i^p)^(1/p)``."""
    r = np.asarray(r, dtype=float)
    ell = np.asarray(ell, dtype=float)
    m = len(r)
    rt = _subset_sums(r)
    cs = _complement_sums(ell ** p)
    vals = rt + cs ** (1.0 / p)
    return _pick(vals, maximize, _allowed(m, fix_bit, fix_val), m)


def star_best_table(r, g, maximize=False, fix_bit=-1, fix_val=0):
    """Best root set for ``r(T) + g[T]`` with ``g`` indexed by bitmask."""
    r = np.asarray(r, dtype=float)
    g = np.asarray(g, dtype=float)
    m = len(r)
    vals = _subset_sums(r) + g
    return _pick(vals, maximize, _allowed(m, fix_bit, fix_val), m)


def star_lp_leaf_threshold(r, ell, p, i, c, maximize=False):
    """Critical bid of leaf ``i`` against the best value ``c`` of root sets holding ``i``.

    Minimisation: sup{x : min_{T not containing i} r(T) + (x^p + s_T)^(1/p) < c}.
    Maximisation: inf{x : max_{T not containing i} r(T) + (x^p + s_T)^(1/p) > c}.
    """
    r = np.asarray(r, dtype=float).copy()
    ell = np.asarray(ell, dtype=float).copy()
    if math.isinf(c):
        return math.inf
    r[i] = 0.0
    ell[i] = 0.0
    m = len(r)
    rt = _subset_sums(r)
    s = _complement_sums(ell ** p)
    keep = ((np.arange(1 << m, dtype=np.int64) >> i) & 1) == 0
    rt = rt[keep]
    s = s[keep]
    gap = c - rt
    with np.errstate(invalid="ignore", over="ignore"):
        room = np.where(gap > 0, gap, 0.0) ** p - s
    if maximize:
        t = np.where((gap > 0) & (room > 0), np.maximum(room, 0.0) ** (1.0 / p), 0.0)
        return float(t.min())
    ok = rt + s ** (1.0 / p) < c
    if not ok.any():
        return 0.0
    t = np.maximum(room[ok], 0.0) ** (1.0 / p)
    return float(t.max())


def _star_oracle_block(rt, comp_sum, comp_max, kind, p):
    if kind == KIND_MAKESPAN:
        return np.maximum(rt, comp_max)
    if kind == KIND_SUM:
        return rt + comp_sum
    return (rt ** p + comp_sum) ** (1.0 / p)


def star_oracle(r, ell, kind, p=1.0, maximize=False):
    """Exact optimum over all root sets; ties go to the smallest bitmask."""
    r = np.asarray(r, dtype=float)
    ell = np.asarray(ell, dtype=float)
    m = len(r)
    lo = min(m, _VECTOR_BITS)
    w = ell ** p if kind == KIND_LP else ell
    rt = _subset_sums(r[:lo])
    cs = _complement_sums(w[:lo])
    cm = _complement_max(ell[:lo])
    best_mask, best_val = -1, None
    for hi in range(1 << (m - lo)):
        rt_b, cs_b, cm_b = rt, cs, cm
        for j in range(lo, m):
            if (hi >> (j - lo)) & 1:
                rt_b = rt_b + r[j]
            else:
                cs_b = cs_b + w[j]
                cm_b = np.maximum(cm_b, ell[j])
        vals = _star_oracle_block(rt_b, cs_b, cm_b, kind, p)
        k = int(np.argmax(vals) if maximize else np.argmin(vals))
        v = float(vals[k])
        if best_val is None or (v > best_val if maximize else v < best_val):
            best_mask, best_val = (hi << lo) | k, v
    return best_mask, best_val


def _reduce(loads: np.ndarray, kind: int, p: float) -> np.ndarray:
    if kind == KIND_MAKESPAN:
        return loads.max(axis=1)
    total = np.zeros(loads.shape[0])
    for i in range(loads.shape[1]):
        total = total + (loads[:, i] if kind == KIND_SUM else loads[:, i] ** p)
    return total if kind == KIND_SUM else total ** (1.0 / p)


def assign_oracle(opt_machine, opt_cost, n_opts, n_machines, kind, p=1.0, maximize=False):
    """Exact optimum over every task-to-option assignment.

    Options are enumerated in ``itertools.product`` order (task 0 most
    significant); ties go to the first assignment in that order. Returns the
    chosen option index per task and the objective value.
    """
    opt_machine = np.asarray(opt_machine)
    opt_cost = np.asarray(opt_cost, dtype=float)
    n_opts = [int(x) for x in n_opts]
    m = len(n_opts)
    # vectorise the trailing tasks, loop over the leading ones
    tail, size = m, 1
    while tail > 0 and size * n_opts[tail - 1] <= (1 << 16):
        tail -= 1
        size *= n_opts[tail]
    best_choice, best_val = None, None
    for head in itertools.product(*(range(n_opts[j]) for j in range(tail))):
        base = np.zeros(n_machines)
        for j, o in enumerate(head):
            base[opt_machine[j, o]] = base[opt_machine[j, o]] + opt_cost[j, o]
        block = base[None, :]
        for j in range(tail, m):
            k = n_opts[j]
            block = np.repeat(block, k, axis=0)
            for o in range(k):
                col = opt_machine[j, o]
                block[o::k, col] = block[o::k, col] + opt_cost[j, o]
        vals = _reduce(block, kind, p)
        idx = int(np.argmax(vals) if maximize else np.argmin(vals))
        v = float(vals[idx])
        if best_val is None or (v > best_val if maximize else v < best_val):
            tail_choice = []
            rem = idx
            for j in range(m - 1, tail - 1, -1):
                tail_choice.append(rem % n_opts[j])
                rem //= n_opts[j]
            best_choice = list(head) + tail_choice[::-1]
            best_val = v
    return np.asarray(best_choice, dtype=np.int64), best_val
