import numpy as np
import pytest

from gbmech.core import Edge, GraphInstance, Objective, StarInstance, objective_value, star_as_graph
from gbmech.decomposition import Star, StarDecomposition, contention_number, star_decomposition
from gbmech.instances import gen_random
from gbmech.mechanisms import get_mechanism
from gbmech.mechanisms.cover import star_cover_allocate, star_cover_payments
from gbmech.mechanisms.offsets import LpLeaf
from gbmech.mechanisms.star import hybrid_star_allocate, hybrid_star_payments
from gbmech.oracle import optimal_value


def single_star(m):
    return StarDecomposition((Star(0, tuple(range(m)), tuple(range(1, m + 1))),))


def test_single_star_is_the_star_rule():
    rng = np.random.default_rng(0)
    for _ in range(150):
        m = int(rng.integers(1, 7))
        star = StarInstance(tuple(rng.uniform(0, 3, m)), tuple(rng.uniform(0, 3, m)))
        g = star_as_graph(star)
        alloc = star_cover_allocate(g, single_star(m))
        want = hybrid_star_allocate(star)
        # graph node j+1 is the leaf of task j, star machine j+1 likewise
        assert alloc.assignment == want.assignment
        assert star_cover_payments(g, single_star(m), alloc) == pytest.approx(hybrid_star_payments(star, want))


def test_path_composes_two_stars():
    # path 0 - 1 - 2 - 3, stars rooted at 1 and at 3
    g = GraphInstance(4, (Edge(0, 1, 1.0, 5.0), Edge(1, 2, 1.0, 1.0), Edge(2, 3, 4.0, 1.0)))
    d = StarDecomposition((Star(1, (0, 1), (0, 2)), Star(3, (2,), (2,))))
    alloc = star_cover_allocate(g, d)
    first = hybrid_star_allocate(StarInstance((5.0, 1.0), (1.0, 1.0)))
    second = hybrid_star_allocate(StarInstance((1.0,), (4.0,)))
    leaves = (0, 2)
    assert alloc.assignment[:2] == tuple(1 if a == 0 else leaves[a - 1] for a in first.assignment)
    assert alloc.assignment[2] == (3 if second.assignment == (0,) else 2)
    pay = star_cover_payments(g, d, alloc)
    p1 = hybrid_star_payments(StarInstance((5.0, 1.0), (1.0, 1.0)), first)
    p2 = hybrid_star_payments(StarInstance((1.0,), (4.0,)), second)
    assert pay == pytest.approx([p1[1], p1[0], p1[2] + p2[1], p2[0]])


@pytest.mark.parametrize("method", ["degeneracy", "orientation", "best"])
def test_tree_makespan_within_four(method):
    mech = get_mechanism("star-cover", decomposition=method)
    obj = Objective.makespan()
    worst = 0.0
    for seed in range(150):
        g = gen_random("tree", seed=seed, n=int(np.random.default_rng(seed).integers(2, 11)))
        alg = objective_value(g, mech.allocate(g), obj)
        opt = optimal_value(g, obj)
        worst = max(worst, alg / opt)
    assert worst <= 4 + 1e-9


def test_graph_makespan_within_twice_contention():
    mech = get_mechanism("star-cover", decomposition="best")
    obj = Objective.makespan()
    for seed in range(60):
        g = gen_random("graph", seed=seed, n=6, q=0.5)
        if g.m == 0:
            continue
        c = contention_number(star_decomposition(g, "best"))
        alg = objective_value(g, mech.allocate(g), obj)
        assert alg <= 2 * c * optimal_value(g, obj) + 1e-9


def test_lp_offsets_on_stars():
    mech = get_mechanism("star-cover", p=2.0)
    g = gen_random("tree", seed=3, n=8)
    d = star_decomposition(g, "degeneracy")
    assert mech.allocate(g) == star_cover_allocate(g, d, LpLeaf(2.0))
