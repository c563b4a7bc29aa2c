"""Hybrid rule on hyperstars.

Given the root set ``T``, the cheapest way to spread it over the roots is
task by task, so the rule is the star rule on the effective root costs
``c_j = min_h lambda_h r_hj``.
"""
from __future__ import annotations

from gbmech.core import INF, Allocation, HyperstarInstance, validate_allocation, weighted
from gbmech.mechanisms.offsets import DEFAULT_TIE, GFunctionSpec, MaxLeaf, TieBreakPolicy
from gbmech.mechanisms.star import leaf_threshold, select_root_set


def effective_root_costs(inst: HyperstarInstance, skip: int | None = None) -> tuple[list[float], list[int]]:
    """Per task: the smallest weighted root cost and the lowest root attaining it.

    With ``skip`` set, that root is left out (cost ``inf`` if no root remains).
    """
    costs, owners = [], []
    for j in range(inst.m):
        best, owner = INF, -1
        for h in range(inst.k):
            if h == skip:
                continue
            v = weighted(inst.lambdas[h], inst.root_costs[h][j])
            if owner < 0 or v < best:
                best, owner = v, h
        costs.append(best)
        owners.append(owner)
    return costs, owners


def hybrid_hyperstar_allocate(inst: HyperstarInstance, g: GFunctionSpec | None = None,
                              tie: TieBreakPolicy = DEFAULT_TIE, method: str = "auto") -> Allocation:
    g = MaxLeaf() if g is None else g
    c, owners = effective_root_costs(inst)
    mask, _ = select_root_set(c, inst.leaf_costs, g, tie, method=method)
    return Allocation(tuple(owners[j] if (mask >> j) & 1 else inst.k + j for j in range(inst.m)))


def hybrid_hyperstar_payments(inst: HyperstarInstance, alloc: Allocation, g: GFunctionSpec | None = None,
                              tie: TieBreakPolicy = DEFAULT_TIE) -> list[float]:
    """Roots: scaled difference of the best objective without them; leaves: critical bids.

    For root ``h`` with bundle ``X``, ``G(X)`` is the best value of the
    Hybrid objective when ``X`` is free and other tasks may only use the
    remaining roots. Root ``h`` receives ``(G(empty) - G(X)) / lambda_h``
    (unscaled when ``lambda_h = 0``, where its bid cannot matter).
    """
    g = MaxLeaf() if g is None else g
    validate_allocation(inst, alloc)
    ell = inst.leaf_costs
    pay = [0.0] * inst.n_machines
    for h in range(inst.k):
        bundle = alloc.bundle(h)
        if not bundle:
            continue
        rest, _ = effective_root_costs(inst, skip=h)
        base = select_root_set(rest, ell, g, tie)[1]
        free = [0.0 if j in bundle else rest[j] for j in range(inst.m)]
        with_bundle = select_root_set(free, ell, g, tie)[1]
        diff = 0.0 if base == with_bundle else base - with_bundle
        lam = inst.lambdas[h]
        pay[h] = diff / lam if lam > 0 else diff
    c, _ = effective_root_costs(inst)
    for j in range(inst.m):
        if alloc.assignment[j] == inst.k + j:
            pay[inst.k + j] = leaf_threshold(c, ell, g, j, tie)
    return pay

