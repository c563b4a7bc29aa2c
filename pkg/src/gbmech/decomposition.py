"""Star decompositions of (multi)graphs, orientations and degeneracy orderings.

A star decomposition partitions the edges into stars; its contention number
is the largest number of stars any node takes part in. Two constructions are
provided: one from an edge orientation (each node roots the star of its
outgoing edges) and one from a degeneracy ordering (each node roots the star
of its edges to earlier nodes).
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass

from gbmech.core import CapacityError, GraphInstance, StructuralError


@dataclass(frozen=True)
class Star:
    root: int
    edges: tuple[int, ...]
    leaves: tuple[int, ...]

    def nodes(self) -> frozenset[int]:
        return frozenset((self.root,) + self.leaves)


@dataclass(frozen=True)
class StarDecomposition:
    stars: tuple[Star, ...]

    def star_of(self) -> dict[int, int]:
        out = {}
        for s_idx, star in enumerate(self.stars):
            for e in star.edges:
                out[e] = s_idx
        return out

    def to_dict(self) -> dict:
        return {
            "stars": [
                {"root": s.root, "edges": list(s.edges), "leaves": list(s.leaves)}
                for s in self.stars
            ]
        }


@dataclass(frozen=True)
class Orientation:
    """``heads[e]`` is the endpoint edge ``e`` points to."""

    heads: tuple[int, ...]

    def indegrees(self, n: int) -> list[int]:
        deg = [0] * n
        for h in self.heads:
            deg[h] += 1
        return deg

    def max_indegree(self, n: int) -> int:
        return max(self.indegrees(n), default=0)


@dataclass(frozen=True)
class DegeneracyOrdering:
    """Every node has at most ``k`` neighbours later in ``order`` (with multiplicity)."""

    order: tuple[int, ...]
    k: int


def validate_decomposition(g: GraphInstance, decomp: StarDecomposition, distinct_leaves: bool = True) -> None:
    seen: dict[int, int] = {}
    for s_idx, star in enumerate(decomp.stars):
        if len(star.edges) != len(star.leaves):
            raise StructuralError(f"star {s_idx} lists {len(star.edges)} edges but {len(star.leaves)} leaves")
        for e, leaf in zip(star.edges, star.leaves):
            if not 0 <= e < g.m:
                raise StructuralError(f"star {s_idx} references unknown edge {e}")
            if e in seen:
                raise StructuralError(f"edge {e} appears in stars {seen[e]} and {s_idx}")
            seen[e] = s_idx
            edge = g.edges[e]
            if star.root not in (edge.u, edge.v) or edge.other(star.root) != leaf:
                raise StructuralError(f"edge {e} is not a spoke from root {star.root} to leaf {leaf}")
        if distinct_leaves and len(set(star.leaves)) != len(star.leaves):
            raise StructuralError(f"star {s_idx} reaches a leaf twice")
    missing = [e for e in range(g.m) if e not in seen]
    if missing:
        raise StructuralError(f"decomposition misses edges {missing[:10]}")


def contention_number(decomp: StarDecomposition) -> int:
    count: dict[int, int] = defaultdict(int)
    for star in decomp.stars:
        for v in star.nodes():
            count[v] += 1
    return max(count.values(), default=0)


def _stars_by_root(g: GraphInstance, root_of_edge: list[int]) -> StarDecomposition:
    """Group edges by root; parallel spokes to one leaf go to separate layers."""
    per_root: dict[int, list[int]] = defaultdict(list)
    for e, root in enumerate(root_of_edge):
        per_root[root].append(e)
    stars = []
    for root in sorted(per_root):
        layers: list[list[int]] = []
        used: list[set[int]] = []
        for e in per_root[root]:
            leaf = g.edges[e].other(root)
            for layer, leaves in zip(layers, used):
                if leaf not in leaves:
                    layer.append(e)
                    leaves.add(leaf)
                    break
            else:
                layers.append([e])
                used.append({leaf})
        for layer in layers:
            stars.append(Star(root, tuple(layer), tuple(g.edges[e].other(root) for e in layer)))
    return StarDecomposition(tuple(stars))


def star_cover_from_orientation(g: GraphInstance, o: Orientation) -> StarDecomposition:
    if len(o.heads) != g.m:
        raise StructuralError("orientation length differs from the edge count")
    tails = []
    for e, h in zip(g.edges, o.heads):
        if h not in (e.u, e.v):
            raise StructuralError(f"orientation points edge ({e.u}, {e.v}) at {h}")
        tails.append(e.other(h))
    return _stars_by_root(g, tails)


def star_cover_from_ordering(g: GraphInstance, ordering: DegeneracyOrdering) -> StarDecomposition:
    if sorted(ordering.order) != list(range(g.n)):
        raise StructuralError("ordering is not a permutation of the nodes")
    pos = {v: i for i, v in enumerate(ordering.order)}
    roots = [e.u if pos[e.u] > pos[e.v] else e.v for e in g.edges]
    return _stars_by_root(g, roots)


def degeneracy_ordering(g: GraphInstance) -> DegeneracyOrdering:
    """Repeatedly remove a minimum-degree node (smallest id on ties).

    The removal order itself has the property that each node has at most
    ``k`` neighbours removed after it.
    """
    deg = [0] * g.n
    adj: list[dict[int, int]] = [defaultdict(int) for _ in range(g.n)]
    for e in g.edges:
        deg[e.u] += 1
        deg[e.v] += 1
        adj[e.u][e.v] += 1
        adj[e.v][e.u] += 1
    alive = set(range(g.n))
    order, k = [], 0
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        k = max(k, deg[v])
        order.append(v)
        alive.remove(v)
        for w, mult in adj[v].items():
            if w in alive:
                deg[w] -= mult
    return DegeneracyOrdering(tuple(order), k)


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.graph: list[list[list[int]]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, cap: int) -> list[int]:
        fwd = [v, cap, len(self.graph[v])]
        back = [u, 0, len(self.graph[u])]
        self.graph[u].append(fwd)
        self.graph[v].append(back)
        return fwd

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                for v, cap, _ in self.graph[u]:
                    if cap > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        q.append(v)
            if level[t] < 0:
                return flow
            it = [0] * self.n

            def dfs(u: int, pushed: int) -> int:
                if u == t:
                    return pushed
                while it[u] < len(self.graph[u]):
                    arc = self.graph[u][it[u]]
                    v, cap, rev = arc
                    if cap > 0 and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, cap))
                        if got:
                            arc[1] -= got
                            self.graph[v][rev][1] += got
                            return got
                    it[u] += 1
                return 0

            while True:
                got = dfs(s, 1 << 60)
                if not got:
                    break
                flow += got


def _orient_with_bound(g: GraphInstance, gamma: int) -> Orientation | None:
    """Orientation with in-degree <= gamma, or None if none exists."""
    m, n = g.m, g.n
    src, sink = 0, 1 + m + n
    net = _Dinic(m + n + 2)
    arcs = []
    for e_idx, e in enumerate(g.edges):
        net.add_edge(src, 1 + e_idx, 1)
        arcs.append((net.add_edge(1 + e_idx, 1 + m + e.u, 1), net.add_edge(1 + e_idx, 1 + m + e.v, 1)))
    for v in range(n):
        net.add_edge(1 + m + v, sink, gamma)
    if net.max_flow(src, sink) < m:
        return None
    heads = []
    for e, (to_u, _) in zip(g.edges, arcs):
        heads.append(e.u if to_u[1] == 0 else e.v)
    return Orientation(tuple(heads))


def orientation_number(g: GraphInstance) -> tuple[int, Orientation]:
    """Exact minimum over orientations of the maximum in-degree, with a witness."""
    if g.m == 0:
        return 0, Orientation(())
    lo = max(1, -(-g.m // g.n))
    hi = max(g.degree(v) for v in range(g.n))
    best = _orient_with_bound(g, hi)
    while lo < hi:
        mid = (lo + hi) // 2
        o = _orient_with_bound(g, mid)
        if o is None:
            lo = mid + 1
        else:
            hi, best = mid, o
    if best is None or best.max_indegree(g.n) != hi:
        best = _orient_with_bound(g, hi)
    return hi, best


def orientation_number_bruteforce(g: GraphInstance, max_edges: int = 20) -> tuple[int, Orientation]:
    if g.m > max_edges:
        raise CapacityError(f"brute-force orientation over {g.m} edges exceeds {max_edges}", g.m, max_edges)
    best_val, best = None, None
    for bits in itertools.product((0, 1), repeat=g.m):
        heads = tuple(e.v if b else e.u for e, b in zip(g.edges, bits))
        o = Orientation(heads)
        val = o.max_indegree(g.n)
        if best_val is None or val < best_val:
            best_val, best = val, o
    return (best_val or 0), (best or Orientation(()))


@dataclass(frozen=True)
class DecompositionReport:
    orientation_number: int
    orientation: Orientation
    degeneracy: int
    ordering: DegeneracyOrdering
    method: str
    decomposition: StarDecomposition
    contention: int

    @property
    def bounds(self) -> dict[str, int]:
        return {
            "2c": 2 * self.contention,
            "2o+2": 2 * self.orientation_number + 2,
            "2k+2": 2 * self.degeneracy + 2,
        }


def decompose(g: GraphInstance, method: str = "best") -> DecompositionReport:
    """Both constructions; ``best`` keeps the one with smaller contention (orientation on ties)."""
    o_num, orient = orientation_number(g)
    ordering = degeneracy_ordering(g)
    by_orient = star_cover_from_orientation(g, orient)
    by_order = star_cover_from_ordering(g, ordering)
    c_orient, c_order = contention_number(by_orient), contention_number(by_order)
    if method == "orientation" or (method == "best" and c_orient <= c_order):
        chosen, c, name = by_orient, c_orient, "orientation"
    elif method in ("degeneracy", "best"):
        chosen, c, name = by_order, c_order, "degeneracy"
    else:
        raise StructuralError(f"unknown decomposition method {method!r}")
    return DecompositionReport(o_num, orient, ordering.k, ordering, name, chosen, c)


def star_decomposition(g: GraphInstance, method: str = "degeneracy") -> StarDecomposition:
    if method == "orientation":
        return star_cover_from_orientation(g, orientation_number(g)[1])
    if method == "degeneracy":
        return star_cover_from_ordering(g, degeneracy_ordering(g))
    if method == "best":
        return decompose(g, "best").decomposition
    raise StructuralError(f"unknown decomposition method {method!r}")
