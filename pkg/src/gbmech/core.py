"""Domain types shared by the mechanisms, oracles and verifiers.

Costs are plain floats in ``[0, inf]``. ``math.inf`` is a legal cost (lower-bound
instances use it as a "cannot process" bid) and float arithmetic already
saturates the way we need: ``inf + x == inf`` and comparisons are total once
NaN is excluded at construction time.

Machine numbering
-----------------
* star: root is machine 0, the leaf of task ``j`` is machine ``j + 1``;
* hyperstar: roots are machines ``0 .. k-1``, the leaf of task ``j`` is ``k + j``;
* graph: machines are the node ids.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

INF = math.inf
TOL = 1e-9


class GBMechError(Exception):
    """Base class for library errors."""


class StructuralError(GBMechError, ValueError):
    """Malformed instance, allocation or decomposition."""


class CapacityError(GBMechError):
    """An exhaustive search would exceed the configured limit."""

    def __init__(self, message: str, size: int | None = None, limit: int | None = None):
        super().__init__(message)
        self.size = size
        self.limit = limit


class InapplicableError(GBMechError):
    """A mechanism was asked to run on an instance type it does not handle."""


class DegenerateInstanceError(GBMechError, ZeroDivisionError):
    """A ratio was requested against a zero optimum (or zero mechanism value)."""


def as_cost(x) -> float:
    """Validate and coerce a cost: finite >= 0 or +inf (also accepts ``"inf"``)."""
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "+inf", "infinity"):
            return INF
        raise StructuralError(f"invalid cost {x!r}")
    try:
        v = float(x)
    except (TypeError, ValueError) as exc:
        raise StructuralError(f"invalid cost {x!r}") from exc
    if math.isnan(v) or v < 0:
        raise StructuralError(f"cost must be >= 0 or inf, got {x!r}")
    return v


def _costs(values: Iterable) -> tuple[float, ...]:
    return tuple(as_cost(v) for v in values)


def weighted(lam: float, cost: float) -> float:
    """``lam * cost`` with the convention ``0 * inf = 0``."""
    if lam == 0:
        return 0.0
    return lam * cost


def mask_to_set(mask: int) -> frozenset[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return frozenset(out)


def set_to_mask(items: Iterable[int]) -> int:
    mask = 0
    for j in items:
        mask |= 1 << j
    return mask


@dataclass(frozen=True)
class StarInstance:
    root_costs: tuple[float, ...]
    leaf_costs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "root_costs", _costs(self.root_costs))
        object.__setattr__(self, "leaf_costs", _costs(self.leaf_costs))
        if len(self.root_costs) != len(self.leaf_costs):
            raise StructuralError("root and leaf cost vectors differ in length")
        if not self.root_costs:
            raise StructuralError("a star needs at least one task")

    @property
    def m(self) -> int:
        return len(self.root_costs)

    @property
    def n_machines(self) -> int:
        return self.m + 1

    @property
    def n_tasks(self) -> int:
        return self.m

    def eligible(self, task: int) -> tuple[int, ...]:
        return (0, task + 1)

    def cost(self, machine: int, task: int) -> float:
        if machine == 0:
            return self.root_costs[task]
        if machine == task + 1:
            return self.leaf_costs[task]
        raise StructuralError(f"machine {machine} cannot process task {task}")

    def tasks_of(self, player: int) -> tuple[int, ...]:
        if player == 0:
            return tuple(range(self.m))
        if 1 <= player <= self.m:
            return (player - 1,)
        raise StructuralError(f"no player {player} in a star with {self.m} tasks")

    def bid_of(self, player: int) -> tuple[float, ...]:
        if player == 0:
            return self.root_costs
        return (self.leaf_costs[player - 1],)

    def with_bid(self, player: int, bid: Sequence[float]) -> "StarInstance":
        tasks = self.tasks_of(player)
        if len(bid) != len(tasks):
            raise StructuralError("bid length does not match the player's tasks")
        if player == 0:
            return StarInstance(tuple(bid), self.leaf_costs)
        ell = list(self.leaf_costs)
        ell[player - 1] = bid[0]
        return StarInstance(self.root_costs, tuple(ell))


@dataclass(frozen=True)
class HyperstarInstance:
    root_costs: tuple[tuple[float, ...], ...]
    leaf_costs: tuple[float, ...]
    lambdas: tuple[float, ...] | None = None

    def __post_init__(self):
        rows = tuple(_costs(row) for row in self.root_costs)
        object.__setattr__(self, "root_costs", rows)
        object.__setattr__(self, "leaf_costs", _costs(self.leaf_costs))
        if not rows:
            raise StructuralError("a hyperstar needs at least one root")
        m = len(self.leaf_costs)
        if m == 0:
            raise StructuralError("a hyperstar needs at least one task")
        if any(len(row) != m for row in rows):
            raise StructuralError(f"root cost matrix must be {len(rows)}x{m}")
        lams = self.lambdas
        if lams is None:
            lams = (1.0,) * len(rows)
        lams = tuple(float(x) for x in lams)
        if len(lams) != len(rows):
            raise StructuralError("need one lambda per root")
        if any(math.isnan(x) or x < 0 or math.isinf(x) for x in lams):
            raise StructuralError("lambdas must be finite and nonnegative")
        object.__setattr__(self, "lambdas", lams)

    @property
    def k(self) -> int:
        return len(self.root_costs)

    @property
    def m(self) -> int:
        return len(self.leaf_costs)

    @property
    def n_machines(self) -> int:
        return self.k + self.m

    @property
    def n_tasks(self) -> int:
        return self.m

    def eligible(self, task: int) -> tuple[int, ...]:
        return tuple(range(self.k)) + (self.k + task,)

    def cost(self, machine: int, task: int) -> float:
        if machine < self.k:
            return self.root_costs[machine][task]
        if machine == self.k + task:
            return self.leaf_costs[task]
        raise StructuralError(f"machine {machine} cannot process task {task}")

    def tasks_of(self, player: int) -> tuple[int, ...]:
        if 0 <= player < self.k:
            return tuple(range(self.m))
        if self.k <= player < self.k + self.m:
            return (player - self.k,)
        raise StructuralError(f"no player {player}")

    def bid_of(self, player: int) -> tuple[float, ...]:
        if player < self.k:
            return self.root_costs[player]
        return (self.leaf_costs[player - self.k],)

    def with_bid(self, player: int, bid: Sequence[float]) -> "HyperstarInstance":
        tasks = self.tasks_of(player)
        if len(bid) != len(tasks):
            raise StructuralError("bid length does not match the player's tasks")
        if player < self.k:
            rows = list(self.root_costs)
            rows[player] = tuple(bid)
            return HyperstarInstance(tuple(rows), self.leaf_costs, self.lambdas)
        ell = list(self.leaf_costs)
        ell[player - self.k] = bid[0]
        return HyperstarInstance(self.root_costs, tuple(ell), self.lambdas)

    def as_star(self) -> StarInstance:
        """Single-root view; only valid when ``k == 1`` and ``lambda == 1``."""
        if self.k != 1:
            raise StructuralError("only a one-root hyperstar is a star")
        return StarInstance(self.root_costs[0], self.leaf_costs)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cost_u: float
    cost_v: float

    def other(self, node: int) -> int:
        return self.v if node == self.u else self.u

    def cost_at(self, node: int) -> float:
        if node == self.u:
            return self.cost_u
        if node == self.v:
            return self.cost_v
        raise StructuralError(f"node {node} is not an endpoint of ({self.u}, {self.v})")


@dataclass(frozen=True)
class GraphInstance:
    n: int
    edges: tuple[Edge, ...]
    multigraph: bool = False

    def __post_init__(self):
        edges = tuple(
            e if isinstance(e, Edge) else Edge(*e) for e in self.edges
        )
        edges = tuple(Edge(int(e.u), int(e.v), as_cost(e.cost_u), as_cost(e.cost_v)) for e in edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 1:
            raise StructuralError("a graph needs at least one node")
        seen = set()
        for idx, e in enumerate(edges):
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise StructuralError(f"edge {idx} has an endpoint outside 0..{self.n - 1}")
            if e.u == e.v:
                raise StructuralError(f"edge {idx} is a self-loop")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen and not self.multigraph:
                raise StructuralError(f"edge {idx} is parallel to an earlier edge; set multigraph")
            seen.add(key)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def n_machines(self) -> int:
        return self.n

    @property
    def n_tasks(self) -> int:
        return len(self.edges)

    def eligible(self, task: int) -> tuple[int, ...]:
        e = self.edges[task]
        return (e.u, e.v)

    def cost(self, machine: int, task: int) -> float:
        return self.edges[task].cost_at(machine)

    def tasks_of(self, player: int) -> tuple[int, ...]:
        if not 0 <= player < self.n:
            raise StructuralError(f"no node {player}")
        return tuple(i for i, e in enumerate(self.edges) if player in (e.u, e.v))

    def bid_of(self, player: int) -> tuple[float, ...]:
        return tuple(self.edges[i].cost_at(player) for i in self.tasks_of(player))

    def with_bid(self, player: int, bid: Sequence[float]) -> "GraphInstance":
        tasks = self.tasks_of(player)
        if len(bid) != len(tasks):
            raise StructuralError("bid length does not match the player's tasks")
        edges = list(self.edges)
        for i, c in zip(tasks, bid):
            e = edges[i]
            if e.u == player:
                edges[i] = Edge(e.u, e.v, c, e.cost_v)
            else:
                edges[i] = Edge(e.u, e.v, e.cost_u, c)
        return GraphInstance(self.n, tuple(edges), self.multigraph)

    def degree(self, node: int) -> int:
        return sum(1 for e in self.edges if node in (e.u, e.v))

    def max_multiplicity(self) -> int:
        counts: dict[tuple[int, int], int] = {}
        for e in self.edges:
            key = (min(e.u, e.v), max(e.u, e.v))
            counts[key] = counts.get(key, 0) + 1
        return max(counts.values(), default=0)


SchedulingInstance = Union[StarInstance, HyperstarInstance, GraphInstance]


def star_as_graph(inst: StarInstance) -> GraphInstance:
    """Root becomes node 0 and the leaf of task ``j`` node ``j + 1``."""
    edges = tuple(Edge(0, j + 1, r, l) for j, (r, l) in enumerate(zip(inst.root_costs, inst.leaf_costs)))
    return GraphInstance(inst.m + 1, edges)


@dataclass(frozen=True)
class Allocation:
    """Machine id per task, in task-id order."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))

    def bundle(self, machine: int) -> frozenset[int]:
        return frozenset(j for j, a in enumerate(self.assignment) if a == machine)

    def bundles(self, n_machines: int) -> list[frozenset[int]]:
        out: list[set[int]] = [set() for _ in range(n_machines)]
        for j, a in enumerate(self.assignment):
            out[a].add(j)
        return [frozenset(s) for s in out]

    def to_dict(self) -> dict:
        return {"assignment": list(self.assignment)}


def star_allocation(m: int, root_set: Iterable[int]) -> Allocation:
    root_set = set(root_set)
    return Allocation(tuple(0 if j in root_set else j + 1 for j in range(m)))


def root_set(alloc: Allocation) -> frozenset[int]:
    """Tasks a star allocation gives to the root."""
    return alloc.bundle(0)


def validate_allocation(inst: SchedulingInstance, alloc: Allocation) -> None:
    if len(alloc.assignment) != inst.n_tasks:
        raise StructuralError(
            f"allocation covers {len(alloc.assignment)} tasks, instance has {inst.n_tasks}"
        )
    for j, a in enumerate(alloc.assignment):
        if a not in inst.eligible(j):
            raise StructuralError(f"task {j} assigned to ineligible machine {a}")


def loads(inst: SchedulingInstance, alloc: Allocation) -> list[float]:
    validate_allocation(inst, alloc)
    out = [0.0] * inst.n_machines
    for j, a in enumerate(alloc.assignment):
        out[a] = out[a] + inst.cost(a, j)
    return out


@dataclass(frozen=True)
class Objective:
    """``makespan``, ``lp_min`` (0 < p), ``lp_max`` (p >= 1) or ``sum_min``."""

    kind: str = "makespan"
    p: float | None = field(default=None)

    def __post_init__(self):
        if self.kind not in ("makespan", "lp_min", "lp_max", "sum_min"):
            raise StructuralError(f"unknown objective kind {self.kind!r}")
        if self.kind in ("lp_min", "lp_max"):
            if self.p is None or not (self.p > 0) or math.isinf(self.p):
                raise StructuralError("L^p objectives need a finite p > 0")
            if self.kind == "lp_max" and self.p < 1:
                raise StructuralError("maximisation needs p >= 1")
            object.__setattr__(self, "p", float(self.p))
        else:
            object.__setattr__(self, "p", None)

    @property
    def maximize(self) -> bool:
        return self.kind == "lp_max"

    @classmethod
    def makespan(cls) -> "Objective":
        return cls("makespan")

    @classmethod
    def lp_min(cls, p: float) -> "Objective":
        return cls("lp_min", p)

    @classmethod
    def lp_max(cls, p: float) -> "Objective":
        return cls("lp_max", p)

    @classmethod
    def sum_min(cls) -> "Objective":
        return cls("sum_min")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.p is not None:
            d["p"] = self.p
        return d

    def __str__(self) -> str:
        return self.kind if self.p is None else f"{self.kind}(p={self.p:g})"


def reduce_loads(values: Sequence[float], obj: Objective) -> float:
    if obj.kind == "makespan":
        return max(values)
    if obj.kind == "sum_min":
        total = 0.0
        for v in values:
            total = total + v
        return total
    p = obj.p
    total = 0.0
    for v in values:
        total = total + v ** p
    return total ** (1.0 / p)


def objective_value(inst: SchedulingInstance, alloc: Allocation, obj: Objective) -> float:
    return reduce_loads(loads(inst, alloc), obj)


DEFAULT_ENUM_LIMIT = 22


def enumeration_limit() -> int:
    """Largest task count for subset enumeration (``GBMECH_ENUM_LIMIT`` overrides)."""
    raw = os.environ.get("GBMECH_ENUM_LIMIT")
    if raw is None or raw.strip() == "":
        return DEFAULT_ENUM_LIMIT
    try:
        value = int(raw)
    except ValueError as exc:
        raise GBMechError(f"GBMECH_ENUM_LIMIT must be an integer, got {raw!r}") from exc
    if value < 1:
        raise GBMechError("GBMECH_ENUM_LIMIT must be positive")
    return value


def require_enumerable(m: int, what: str = "subset enumeration") -> None:
    limit = enumeration_limit()
    if m > limit:
        raise CapacityError(
            f"{what} over {m} tasks exceeds the enumeration limit of {limit} "
            "(set GBMECH_ENUM_LIMIT to raise it)",
            size=m,
            limit=limit,
        )
