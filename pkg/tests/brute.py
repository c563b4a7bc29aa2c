"""Slow reference implementations written directly from the definitions.

Nothing here imports the package's enumeration code; these are the oracles
the tests compare against.
"""
from __future__ import annotations

import itertools
import math


def subsets(m):
    for size in range(m + 1):
        for combo in itertools.combinations(range(m), size):
            yield frozenset(combo)


def g_max(T, ell):
    return max((ell[i] for i in range(len(ell)) if i not in T), default=0.0)


def g_sum(T, ell):
    total = 0.0
    for i in range(len(ell)):
        if i not in T:
            total += ell[i]
    return total


def g_lp(p):
    def g(T, ell):
        s = 0.0
        for i in range(len(ell)):
            if i not in T:
                s += ell[i] ** p
        return s ** (1 / p)
    return g


def root_sum(r, T):
    total = 0.0
    for i in sorted(T):
        total += r[i]
    return total


def hybrid_value(r, ell, g, T):
    return root_sum(r, T) + g(T, ell)


def hybrid_choice(r, ell, g, maximize=False):
    """Best set under the default order: value, then larger set, then lexicographically first."""
    sign = -1 if maximize else 1
    best = min(
        subsets(len(r)),
        key=lambda T: (sign * hybrid_value(r, ell, g, T), -len(T), tuple(sorted(T))),
    )
    return best, hybrid_value(r, ell, g, best)


def psi(r, ell, g, i):
    without = min(hybrid_value(r, ell, g, T) for T in subsets(len(r)) if i not in T)
    r0 = list(r)
    r0[i] = 0.0
    with_i = min(hybrid_value(r0, ell, g, T) for T in subsets(len(r)) if i in T)
    if math.isinf(without) and math.isinf(with_i):
        return math.inf
    return without - with_i


def loads_of(n_machines, assignment, cost):
    loads = [0.0] * n_machines
    for task, machine in enumerate(assignment):
        loads[machine] += cost(machine, task)
    return loads


def reduce(loads, kind, p=None):
    if kind == "makespan":
        return max(loads)
    if kind == "sum_min":
        return sum(loads)
    return sum(x ** p for x in loads) ** (1 / p)


def opt_value(inst, kind, p=None):
    """Exhaustive optimum over every eligible assignment."""
    maximize = kind == "lp_max"
    choices = [inst.eligible(j) for j in range(inst.n_tasks)]
    vals = (
        reduce(loads_of(inst.n_machines, a, inst.cost), kind, p)
        for a in itertools.product(*choices)
    )
    return max(vals) if maximize else min(vals)


def star_opt(r, ell, kind="makespan", p=None):
    m = len(r)
    best = None
    for T in subsets(m):
        loads = [root_sum(r, T)] + [0.0 if i in T else ell[i] for i in range(m)]
        v = reduce(loads, kind, p)
        if best is None or (v > best if kind == "lp_max" else v < best):
            best = v
    return best


def max_indegree_bruteforce(n, pairs):
    best = None
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        deg = [0] * n
        for (u, v), b in zip(pairs, bits):
            deg[v if b else u] += 1
        val = max(deg, default=0)
        best = val if best is None else min(best, val)
    return best or 0


def degeneracy_bruteforce(n, pairs):
    """Smallest k admitting an order where every node has at most k later neighbours."""
    best = None
    for order in itertools.permutations(range(n)):
        pos = {v: i for i, v in enumerate(order)}
        later = [0] * n
        for u, v in pairs:
            if pos[u] < pos[v]:
                later[u] += 1
            else:
                later[v] += 1
        k = max(later, default=0)
        best = k if best is None else min(best, k)
    return best
