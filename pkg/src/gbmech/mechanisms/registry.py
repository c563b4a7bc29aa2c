"""Named mechanisms with a uniform allocate / payments interface."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from gbmech.core import (
    Allocation,
    GraphInstance,
    HyperstarInstance,
    InapplicableError,
    Objective,
    SchedulingInstance,
    StarInstance,
    StructuralError,
    star_as_graph,
    validate_allocation,
)
from gbmech.decomposition import star_decomposition
from gbmech.mechanisms.cover import star_cover_allocate, star_cover_payments
from gbmech.mechanisms.hyperstar import hybrid_hyperstar_allocate, hybrid_hyperstar_payments
from gbmech.mechanisms.offsets import DEFAULT_TIE, LpLeaf, MaxLeaf, TieBreakPolicy
from gbmech.mechanisms.star import (
    all_or_nothing_allocate,
    all_or_nothing_payments,
    combined_max_mechanism,
    hybrid_lp_max_allocate,
    hybrid_star_allocate,
    hybrid_star_payments,
)
from gbmech.mechanisms.vcg import vcg_allocate, vcg_payments

SHIPPED = (
    "vcg",
    "hybrid-max",
    "hybrid-lp",
    "hybrid-lp-max",
    "all-or-nothing",
    "combined-max",
    "star-cover",
    "hyperstar-hybrid",
)


@dataclass(frozen=True)
class Mechanism:
    """An allocation rule plus payments.

    ``sense`` is ``cost`` when players bear the processing times and are paid,
    or ``value`` when tasks are worth their bid to the receiver and payments
    are charges.
    """

    name: str
    sense: str
    objective: Objective
    accepts: tuple[type, ...]
    allocate_fn: Callable[[SchedulingInstance], Allocation]
    payments_fn: Callable[[SchedulingInstance, Allocation], list[float]] | None
    params: dict = field(default_factory=dict)

    @property
    def maximize(self) -> bool:
        return self.sense == "value"

    def applicable(self, inst: SchedulingInstance) -> bool:
        return isinstance(inst, self.accepts)

    def _check(self, inst):
        if not self.applicable(inst):
            kinds = ", ".join(t.__name__ for t in self.accepts)
            raise InapplicableError(f"{self.name} handles {kinds}, not {type(inst).__name__}")

    def allocate(self, inst: SchedulingInstance) -> Allocation:
        self._check(inst)
        return self.allocate_fn(inst)

    def payments(self, inst: SchedulingInstance, alloc: Allocation | None = None) -> list[float]:
        self._check(inst)
        if self.payments_fn is None:
            raise InapplicableError(f"{self.name} defines no payments")
        if alloc is None:
            alloc = self.allocate_fn(inst)
        validate_allocation(inst, alloc)
        return self.payments_fn(inst, alloc)

    def run(self, inst: SchedulingInstance) -> tuple[Allocation, list[float] | None]:
        alloc = self.allocate(inst)
        pay = self.payments_fn(inst, alloc) if self.payments_fn is not None else None
        return alloc, pay

    @property
    def label(self) -> str:
        extra = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({extra})" if extra else self.name


def _as_graph(inst) -> GraphInstance:
    return star_as_graph(inst) if isinstance(inst, StarInstance) else inst


def _as_hyperstar(inst) -> HyperstarInstance:
    if isinstance(inst, StarInstance):
        return HyperstarInstance((inst.root_costs,), inst.leaf_costs)
    return inst


def _need_max_p(p: float | None) -> float:
    p = 2.0 if p is None else float(p)
    if p < 1:
        raise StructuralError("maximisation mechanisms need p >= 1")
    return p


def get_mechanism(name: str, p: float | None = None, decomposition: str = "degeneracy",
                  tie: TieBreakPolicy = DEFAULT_TIE) -> Mechanism:
    """Build a mechanism from its stable name.

    ``p`` selects the norm for the L^p variants (and switches star-cover and
    hyperstar-hybrid to L^p offsets); ``decomposition`` is ``degeneracy``,
    ``orientation`` or ``best`` for star-cover.
    """
    if name == "vcg":
        return Mechanism(name, "cost", Objective.makespan(),
                         (StarInstance, HyperstarInstance, GraphInstance), vcg_allocate, vcg_payments)
    if name == "hybrid-max":
        g = MaxLeaf()
        return Mechanism(
            name, "cost", Objective.makespan(), (StarInstance,),
            lambda inst: hybrid_star_allocate(inst, g, tie),
            lambda inst, a: hybrid_star_payments(inst, a, g, tie),
        )
    if name == "hybrid-lp":
        p = 2.0 if p is None else float(p)
        g = LpLeaf(p)
        return Mechanism(
            name, "cost", Objective.lp_min(p), (StarInstance,),
            lambda inst: hybrid_star_allocate(inst, g, tie),
            lambda inst, a: hybrid_star_payments(inst, a, g, tie),
            {"p": p},
        )
    if name == "hybrid-lp-max":
        p = _need_max_p(p)
        g = LpLeaf(p)
        return Mechanism(
            name, "value", Objective.lp_max(p), (StarInstance,),
            lambda inst: hybrid_lp_max_allocate(inst, p, tie),
            lambda inst, a: hybrid_star_payments(inst, a, g, tie, maximize=True),
            {"p": p},
        )
    if name == "all-or-nothing":
        p = _need_max_p(p)
        return Mechanism(
            name, "value", Objective.lp_max(p), (StarInstance,),
            lambda inst: all_or_nothing_allocate(inst, p),
            lambda inst, a: all_or_nothing_payments(inst, a, p),
            {"p": p},
        )
    if name == "combined-max":
        p = _need_max_p(p)
        g = LpLeaf(p)

        def pay(inst, a):
            if p <= 2:
                return hybrid_star_payments(inst, a, g, tie, maximize=True)
            return all_or_nothing_payments(inst, a, p)

        return Mechanism(name, "value", Objective.lp_max(p), (StarInstance,),
                         lambda inst: combined_max_mechanism(inst, p), pay, {"p": p})
    if name == "star-cover":
        g = MaxLeaf() if p is None else LpLeaf(float(p))
        obj = Objective.makespan() if p is None else Objective.lp_min(float(p))

        def alloc(inst):
            graph = _as_graph(inst)
            return star_cover_allocate(graph, star_decomposition(graph, decomposition), g, tie)

        def pay(inst, a):
            graph = _as_graph(inst)
            return star_cover_payments(graph, star_decomposition(graph, decomposition), a, g, tie)

        params = {"decomposition": decomposition}
        if p is not None:
            params["p"] = float(p)
        return Mechanism(name, "cost", obj, (GraphInstance, StarInstance), alloc, pay, params)
    if name == "hyperstar-hybrid":
        g = MaxLeaf() if p is None else LpLeaf(float(p))
        obj = Objective.makespan() if p is None else Objective.lp_min(float(p))
        return Mechanism(
            name, "cost", obj, (HyperstarInstance, StarInstance),
            lambda inst: hybrid_hyperstar_allocate(_as_hyperstar(inst), g, tie),
            lambda inst, a: hybrid_hyperstar_payments(_as_hyperstar(inst), a, g, tie),
            {} if p is None else {"p": float(p)},
        )
    if name == "anti-monotone":
        from gbmech.verify import anti_monotone_mechanism

        return anti_monotone_mechanism()
    raise StructuralError(f"unknown mechanism {name!r}; choose from {', '.join(SHIPPED)} or anti-monotone")


def payments(inst: SchedulingInstance, mech: Mechanism, alloc: Allocation | None = None) -> list[float]:
    return mech.payments(inst, alloc)
