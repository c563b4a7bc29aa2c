"""Task-by-task VCG: every task goes to its cheapest eligible machine."""
from __future__ import annotations

from gbmech.core import Allocation, SchedulingInstance, validate_allocation


def vcg_allocate(inst: SchedulingInstance) -> Allocation:
    """Cheapest eligible machine per task; ties to the lowest machine id."""
    out = []
    for j in range(inst.n_tasks):
        machines = sorted(inst.eligible(j))
        out.append(min(machines, key=lambda a: (inst.cost(a, j), a)))
    return Allocation(tuple(out))


def vcg_payments(inst: SchedulingInstance, alloc: Allocation) -> list[float]:
    """Clarke pivot: the winner of each task is paid the best competing cost."""
    validate_allocation(inst, alloc)
    pay = [0.0] * inst.n_machines
    for j, a in enumerate(alloc.assignment):
        rival = min(inst.cost(b, j) for b in inst.eligible(j) if b != a)
        pay[a] = pay[a] + rival
    return pay
