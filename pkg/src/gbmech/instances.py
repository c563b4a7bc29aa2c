"""Instance generators, lower-bound families and the JSON instance format."""
from __future__ import annotations

import io
import json
import math
import os
import re
from dataclasses import dataclass
from typing import Any, TextIO

import numpy as np

from gbmech.core import (
    INF,
    Allocation,
    Edge,
    GBMechError,
    GraphInstance,
    HyperstarInstance,
    Objective,
    SchedulingInstance,
    StarInstance,
    StructuralError,
    objective_value,
    star_allocation,
)

FORMAT_VERSION = 1
PHI = (1 + math.sqrt(5)) / 2


class ParseError(GBMechError):
    """Unreadable instance file; the message starts with ``file:line``."""

    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


# -- lower-bound families -----------------------------------------------------

def gen_local_lb(m: int) -> StarInstance:
    """Cheap root (``1/sqrt(m)`` per task) against unit leaves."""
    if m < 1:
        raise StructuralError("m must be at least 1")
    return StarInstance((1 / math.sqrt(m),) * m, (1.0,) * m)


def gen_star_lb(m: int, a: float = 2.0) -> StarInstance:
    """Geometric star: ``r_j = a^(j-1)``, ``ell_j = a^j`` (1-based ``j``)."""
    if not a > 1:
        raise StructuralError("the geometric base must exceed 1")
    return StarInstance(tuple(a ** j for j in range(m)), tuple(a ** (j + 1) for j in range(m)))


def gen_tree_lb(k: int, a: float = PHI, H: float = 1e9) -> GraphInstance:
    """Geometric star on nodes ``0..k`` with a pendant dummy node per star node.

    Star edge ``(0, j)`` costs ``a^(j-1)`` at the centre and ``a^j`` at ``j``.
    Dummy node ``k+1+v`` hangs off star node ``v``; that edge is free for
    ``v`` and costs ``H`` for the dummy.
    """
    if k < 1:
        raise StructuralError("k must be at least 1")
    if not a > 1:
        raise StructuralError("the geometric base must exceed 1")
    if H < 1e6 * a ** k:
        raise StructuralError("H must dwarf every other cost")
    edges = [Edge(0, j, a ** (j - 1), a ** j) for j in range(1, k + 1)]
    edges += [Edge(v, k + 1 + v, 0.0, H) for v in range(k + 1)]
    return GraphInstance(2 * (k + 1), tuple(edges))


def lp_lb_alpha(p: float) -> float:
    return (2 ** p - 1) ** (1 / p)


def gen_lp_lb(m: int, p: float) -> StarInstance:
    """``r_j = 2^(j-1)``, ``ell_j = alpha 2^(j-1)`` with ``alpha = (2^p - 1)^(1/p)``."""
    if p < 1:
        raise StructuralError("p must be at least 1")
    alpha = lp_lb_alpha(p)
    return StarInstance(tuple(2.0 ** j for j in range(m)), tuple(alpha * 2.0 ** j for j in range(m)))


def gen_lp_small_lb(a: float, p: float) -> StarInstance:
    """Two tasks: ``r = (a^(1/p), a)``, ``ell = (inf, 1)``."""
    if not 0 < p <= 1:
        raise StructuralError("p must lie in (0, 1]")
    if not a > 1:
        raise StructuralError("a must exceed 1")
    return StarInstance((a ** (1 / p), a), (INF, 1.0))


def gen_max_lb() -> StarInstance:
    return StarInstance((1.0, 1 / 3), (0.0, 1.0))


def gen_max_lb_deviation(eps: float = 1e-6) -> StarInstance:
    if not eps > 0:
        raise StructuralError("eps must be positive")
    return StarInstance((3.0, 1 / 3 - eps), (0.0, 1.0))


# -- replays ------------------------------------------------------------------

@dataclass(frozen=True)
class MaxLowerBoundReplay:
    opt_primary: float
    all_to_root: float
    opt_deviation: float
    kept_on_deviation: float

    @property
    def ratios(self) -> tuple[float, float]:
        return self.opt_primary / self.all_to_root, self.opt_deviation / self.kept_on_deviation


def replay_max_lb(eps: float = 1e-6) -> MaxLowerBoundReplay:
    """Evaluate the two-task auction instance and its deviation with p = 2."""
    from gbmech.oracle import optimal_value

    obj = Objective.lp_max(2.0)
    base, dev = gen_max_lb(), gen_max_lb_deviation(eps)
    return MaxLowerBoundReplay(
        opt_primary=optimal_value(base, obj),
        all_to_root=objective_value(base, star_allocation(2, (0, 1)), obj),
        opt_deviation=optimal_value(dev, obj),
        kept_on_deviation=objective_value(dev, star_allocation(2, (0,)), obj),
    )


@dataclass(frozen=True)
class SmallPLowerBoundReplay:
    a: float
    p: float
    opt: float
    best_other: float
    deviation_opt: float
    deviation_kept: float

    @property
    def bound(self) -> float:
        return min(self.best_other / self.opt, self.deviation_kept / self.deviation_opt)


def replay_lp_small_lb(a: float = PHI, p: float = 0.5, eps: float = 1e-9) -> SmallPLowerBoundReplay:
    """Either the mechanism splits the two tasks (ratio vs. the optimum) or keeps
    both at the root, in which case lowering the root bids keeps that outcome."""
    from gbmech.oracle import optimal_allocation

    obj = Objective.lp_min(p)
    inst = gen_lp_small_lb(a, p)
    alloc, opt = optimal_allocation(inst, obj)
    others = [
        objective_value(inst, star_allocation(2, s), obj)
        for s in ((0,), (0, 1))
        if star_allocation(2, s) != alloc
    ]
    dev = StarInstance((0.0, a - eps), inst.leaf_costs)
    return SmallPLowerBoundReplay(
        a=a,
        p=p,
        opt=opt,
        best_other=min(others),
        deviation_opt=optimal_allocation(dev, obj)[1],
        deviation_kept=objective_value(dev, star_allocation(2, (0, 1)), obj),
    )


# -- random instances ---------------------------------------------------------

def _tree_edges(rng: np.random.Generator, n: int) -> list[tuple[int, int]]:
    return [(int(rng.integers(0, v)), v) for v in range(1, n)]


def gen_random(kind: str, seed: int = 0, **params: Any) -> SchedulingInstance:
    """Seeded random instance with costs uniform in ``[lo, hi)`` (default ``[0, 1)``).

    kinds and parameters:
      star (m), hyperstar (k, m, lambdas), tree (n; random attachment),
      graph (n, q; Erdos-Renyi), multigraph (n, q, w; multiplicity 1..w),
      degenerate (n, k; each node joins 1..k earlier nodes).
    """
    rng = np.random.default_rng(seed)
    lo, hi = float(params.pop("lo", 0.0)), float(params.pop("hi", 1.0))

    def costs(size):
        return tuple(float(x) for x in rng.uniform(lo, hi, size))

    def done():
        if params:
            raise StructuralError(f"unused parameters for {kind}: {sorted(params)}")

    if kind == "star":
        m = int(params.pop("m", 5))
        done()
        return StarInstance(costs(m), costs(m))
    if kind == "hyperstar":
        k, m = int(params.pop("k", 2)), int(params.pop("m", 4))
        lambdas = params.pop("lambdas", None)
        done()
        rows = tuple(costs(m) for _ in range(k))
        return HyperstarInstance(rows, costs(m), None if lambdas is None else tuple(lambdas))
    if kind in ("tree", "graph", "multigraph", "degenerate"):
        n = int(params.pop("n", 6))
        if n < 1:
            raise StructuralError("n must be at least 1")
        multigraph = False
        if kind == "tree":
            pairs = _tree_edges(rng, n)
        elif kind == "graph":
            q = float(params.pop("q", 0.5))
            pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < q]
        elif kind == "multigraph":
            q, w = float(params.pop("q", 0.5)), int(params.pop("w", 2))
            multigraph = True
            pairs = []
            for u in range(n):
                for v in range(u + 1, n):
                    if rng.random() < q:
                        pairs += [(u, v)] * int(rng.integers(1, w + 1))
        else:
            k = int(params.pop("k", 2))
            pairs = []
            for v in range(1, n):
                cnt = int(rng.integers(1, min(v, k) + 1))
                for u in sorted(int(x) for x in rng.choice(v, size=cnt, replace=False)):
                    pairs.append((u, v))
        done()
        edges = tuple(Edge(u, v, *costs(2)) for u, v in pairs)
        return GraphInstance(n, edges, multigraph)
    raise StructuralError(f"unknown random family {kind!r}")


# -- JSON format --------------------------------------------------------------

def _enc(x: float):
    return "inf" if math.isinf(x) else x


def instance_to_dict(inst: SchedulingInstance, objective: Objective | None = None) -> dict:
    d: dict[str, Any] = {"format_version": FORMAT_VERSION}
    if isinstance(inst, StarInstance):
        d.update(type="star", m=inst.m, root_costs=[_enc(x) for x in inst.root_costs],
                 leaf_costs=[_enc(x) for x in inst.leaf_costs])
    elif isinstance(inst, HyperstarInstance):
        d.update(type="hyperstar", k=inst.k, m=inst.m,
                 root_costs=[[_enc(x) for x in row] for row in inst.root_costs],
                 leaf_costs=[_enc(x) for x in inst.leaf_costs], lambdas=list(inst.lambdas))
    elif isinstance(inst, GraphInstance):
        d.update(type="graph", n=inst.n, multigraph=inst.multigraph,
                 edges=[{"u": e.u, "v": e.v, "cost_u": _enc(e.cost_u), "cost_v": _enc(e.cost_v)}
                        for e in inst.edges])
    else:
        raise StructuralError(f"cannot serialise {type(inst).__name__}")
    if objective is not None:
        d["objective"] = objective.to_dict()
    return d


def dumps_instance(inst: SchedulingInstance, objective: Objective | None = None) -> str:
    return json.dumps(instance_to_dict(inst, objective), indent=2) + "\n"


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _objective_from(d: dict) -> Objective:
    if not isinstance(d, dict) or "kind" not in d:
        raise StructuralError("objective must be an object with a kind")
    return Objective(d["kind"], d.get("p"))


def instance_from_dict(d: dict) -> tuple[SchedulingInstance, Objective | None]:
    if not isinstance(d, dict):
        raise StructuralError("top level must be an object")
    if d.get("format_version") != FORMAT_VERSION:
        raise StructuralError(f"format_version must be {FORMAT_VERSION}")
    kind = d.get("type")
    try:
        if kind == "star":
            inst = StarInstance(tuple(d["root_costs"]), tuple(d["leaf_costs"]))
            if "m" in d and d["m"] != inst.m:
                raise StructuralError(f"m is {d['m']} but {inst.m} costs are given")
        elif kind == "hyperstar":
            inst = HyperstarInstance(tuple(tuple(row) for row in d["root_costs"]), tuple(d["leaf_costs"]),
                                     None if d.get("lambdas") is None else tuple(d["lambdas"]))
            if d.get("k", inst.k) != inst.k or d.get("m", inst.m) != inst.m:
                raise StructuralError("k/m do not match the cost matrix")
        elif kind == "graph":
            edges = tuple(Edge(int(e["u"]), int(e["v"]), e["cost_u"], e["cost_v"]) for e in d["edges"])
            inst = GraphInstance(int(d["n"]), edges, bool(d.get("multigraph", False)))
        else:
            raise StructuralError(f"unknown instance type {kind!r}")
    except KeyError as exc:
        raise StructuralError(f"missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise StructuralError(f"malformed field: {exc}") from exc
    obj = _objective_from(d["objective"]) if d.get("objective") is not None else None
    return inst, obj


def loads_instance(text: str, source: str = "<string>") -> tuple[SchedulingInstance, Objective | None]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(source, exc.lineno, exc.msg) from exc
    try:
        return instance_from_dict(d)
    except StructuralError as exc:
        msg = str(exc)
        quoted = re.findall(r"'([a-z_]+)'", msg)
        line = 1
        for cand in quoted + ["format_version", "edges", "root_costs", "leaf_costs", "type"]:
            found = _line_of(text, cand) if cand in msg else None
            if found is not None:
                line = found
                break
        raise ParseError(source, line, msg) from exc


def load_instance(path: str | os.PathLike) -> tuple[SchedulingInstance, Objective | None]:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read(), str(path))


def dump_instance(inst: SchedulingInstance, dest: str | os.PathLike | TextIO,
                  objective: Objective | None = None) -> None:
    text = dumps_instance(inst, objective)
    if isinstance(dest, io.TextIOBase) or hasattr(dest, "write"):
        dest.write(text)
        return
    with open(dest, "w", encoding="utf-8") as fh:
        fh.write(text)


def allocation_from_dict(d: dict) -> Allocation:
    if not isinstance(d, dict) or not isinstance(d.get("assignment"), list):
        raise StructuralError("an allocation is an object with an assignment list")
    return Allocation(tuple(int(a) for a in d["assignment"]))


FAMILIES = ("local", "star", "tree", "lp", "lp-small", "max", "max-deviation",
            "random-star", "random-hyperstar", "random-tree", "random-graph",
            "random-multigraph", "random-degenerate")


def generate(family: str, seed: int = 0, **params: Any) -> SchedulingInstance:
    """Dispatch by family name (used by the command line)."""
    params = {k: v for k, v in params.items() if v is not None}
    if family == "local":
        return gen_local_lb(int(params.get("m", 16)))
    if family == "star":
        return gen_star_lb(int(params.get("m", 10)), float(params.get("a", 2.0)))
    if family == "tree":
        return gen_tree_lb(int(params.get("k", 3)), float(params.get("a", PHI)), float(params.get("H", 1e9)))
    if family == "lp":
        return gen_lp_lb(int(params.get("m", 8)), float(params.get("p", 2.0)))
    if family == "lp-small":
        return gen_lp_small_lb(float(params.get("a", PHI)), float(params.get("p", 0.5)))
    if family == "max":
        return gen_max_lb()
    if family == "max-deviation":
        return gen_max_lb_deviation(float(params.get("eps", 1e-6)))
    if family.startswith("random-"):
        keys = {"m", "k", "n", "q", "w"}
        return gen_random(family[len("random-"):], seed, **{k: v for k, v in params.items() if k in keys})
    raise StructuralError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
