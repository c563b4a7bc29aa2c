"""Exhaustive optimal allocations and approximation ratios."""
from __future__ import annotations

import logging
import math

import numpy as np

from gbmech import kernels
from gbmech.core import (
    Allocation,
    CapacityError,
    DegenerateInstanceError,
    HyperstarInstance,
    Objective,
    SchedulingInstance,
    StarInstance,
    star_allocation,
)

log = logging.getLogger(__name__)

#: largest assignment space the oracle will enumerate
ORACLE_CAPACITY = 1 << 24

_KIND = {
    "makespan": kernels.KIND_MAKESPAN,
    "lp_min": kernels.KIND_LP,
    "lp_max": kernels.KIND_LP,
    "sum_min": kernels.KIND_SUM,
}


def search_space(inst: SchedulingInstance) -> int:
    if isinstance(inst, HyperstarInstance):
        return (inst.k + 1) ** inst.m
    return 1 << inst.n_tasks


def optimal_allocation(inst: SchedulingInstance, obj: Objective) -> tuple[Allocation, float]:
    """Exact optimum by enumeration; ties go to the first allocation enumerated.

    Stars enumerate root sets by increasing bitmask. Other instances
    enumerate eligible machines per task (in ``inst.eligible`` order) with
    task 0 varying slowest.
    """
    size = search_space(inst)
    if size > ORACLE_CAPACITY:
        raise CapacityError(
            f"oracle search space {size} exceeds capacity {ORACLE_CAPACITY}", size, ORACLE_CAPACITY
        )
    kind = _KIND[obj.kind]
    p = obj.p if obj.p is not None else 1.0
    if isinstance(inst, StarInstance):
        mask, val = kernels.star_oracle(
            np.asarray(inst.root_costs, dtype=float), np.asarray(inst.leaf_costs, dtype=float),
            kind, p, obj.maximize,
        )
        return star_allocation(inst.m, [j for j in range(inst.m) if (mask >> j) & 1]), float(val)
    m = inst.n_tasks
    opts = [inst.eligible(j) for j in range(m)]
    width = max(len(o) for o in opts)
    opt_machine = np.zeros((m, width), dtype=np.int64)
    opt_cost = np.zeros((m, width), dtype=float)
    for j, o in enumerate(opts):
        for t, a in enumerate(o):
            opt_machine[j, t] = a
            opt_cost[j, t] = inst.cost(a, j)
    n_opts = np.array([len(o) for o in opts], dtype=np.int64)
    choice, val = kernels.assign_oracle(opt_machine, opt_cost, n_opts, inst.n_machines, kind, p, obj.maximize)
    return Allocation(tuple(opts[j][int(c)] for j, c in enumerate(choice))), float(val)


def optimal_value(inst: SchedulingInstance, obj: Objective) -> float:
    return optimal_allocation(inst, obj)[1]


def star_makespan_optimum(inst: StarInstance) -> tuple[Allocation, float]:
    """Exact makespan optimum of a star without enumeration.

    Fix the largest leaf load ``L`` that stays on a leaf: every task with
    ``ell_j > L`` must go to the root, and moving any other task off the
    root never hurts. So ``L`` ranges over ``{0} | {ell_j}`` (quadratic time).
    """
    best_val, best_set = None, ()
    for L in sorted({0.0, *inst.leaf_costs}):
        root = tuple(j for j in range(inst.m) if inst.leaf_costs[j] > L)
        kept = [l for l in inst.leaf_costs if l <= L]
        val = max(math.fsum(inst.root_costs[j] for j in root) if root else 0.0, max(kept, default=0.0))
        if best_val is None or val < best_val:
            best_val, best_set = val, root
    return star_allocation(inst.m, best_set), float(best_val)


def ratio(alg_value: float, opt_value: float, obj: Objective | bool = False) -> float:
    """ALG/OPT for minimisation, OPT/ALG for maximisation.

    ``0/0`` counts as 1.0 (and is logged); any other zero denominator raises
    :class:`DegenerateInstanceError`.
    """
    maximize = obj.maximize if isinstance(obj, Objective) else bool(obj)
    num, den = (opt_value, alg_value) if maximize else (alg_value, opt_value)
    if den == 0:
        if num == 0:
            log.info("degenerate instance: both values are zero, ratio taken as 1")
            return 1.0
        raise DegenerateInstanceError(f"ratio with zero denominator (numerator {num})")
    if math.isinf(num) and math.isinf(den):
        log.info("both values infinite, ratio taken as 1")
        return 1.0
    return num / den


def is_degenerate(alg_value: float, opt_value: float, obj: Objective | bool = False) -> bool:
    maximize = obj.maximize if isinstance(obj, Objective) else bool(obj)
    return (alg_value if maximize else opt_value) == 0


__all__ = [
    "ORACLE_CAPACITY", "optimal_allocation", "optimal_value", "ratio", "is_degenerate", "search_space",
    "star_makespan_optimum",
]
