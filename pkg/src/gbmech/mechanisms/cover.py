"""Star-Cover: run a star Hybrid rule independently on every star of a decomposition."""
from __future__ import annotations

from gbmech.core import Allocation, GraphInstance, validate_allocation
from gbmech.decomposition import StarDecomposition, validate_decomposition
from gbmech.mechanisms.offsets import DEFAULT_TIE, GFunctionSpec, MaxLeaf, TieBreakPolicy
from gbmech.mechanisms.star import select_root_set, star_hybrid_payments


def _star_costs(g: GraphInstance, star):
    r = [g.edges[e].cost_at(star.root) for e in star.edges]
    ell = [g.edges[e].cost_at(leaf) for e, leaf in zip(star.edges, star.leaves)]
    return r, ell


def star_cover_allocate(inst: GraphInstance, decomp: StarDecomposition, g: GFunctionSpec | None = None,
                        tie: TieBreakPolicy = DEFAULT_TIE) -> Allocation:
    g = MaxLeaf() if g is None else g
    validate_decomposition(inst, decomp)
    out = [-1] * inst.m
    for star in decomp.stars:
        r, ell = _star_costs(inst, star)
        mask, _ = select_root_set(r, ell, g, tie)
        for pos, (e, leaf) in enumerate(zip(star.edges, star.leaves)):
            out[e] = star.root if (mask >> pos) & 1 else leaf
    return Allocation(tuple(out))


def star_cover_payments(inst: GraphInstance, decomp: StarDecomposition, alloc: Allocation,
                        g: GFunctionSpec | None = None, tie: TieBreakPolicy = DEFAULT_TIE) -> list[float]:
    """Per-star payments, summed per node."""
    g = MaxLeaf() if g is None else g
    validate_decomposition(inst, decomp)
    validate_allocation(inst, alloc)
    pay = [0.0] * inst.n
    for star in decomp.stars:
        r, ell = _star_costs(inst, star)
        mask = 0
        for pos, e in enumerate(star.edges):
            if alloc.assignment[e] == star.root:
                mask |= 1 << pos
        sub = star_hybrid_payments(r, ell, g, mask, tie)
        pay[star.root] = pay[star.root] + sub[0]
        for pos, leaf in enumerate(star.leaves):
            pay[leaf] = pay[leaf] + sub[pos + 1]
    return pay
