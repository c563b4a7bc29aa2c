import logging
import math

import numpy as np
import pytest

import brute
from gbmech.core import (
    CapacityError,
    DegenerateInstanceError,
    Edge,
    GraphInstance,
    HyperstarInstance,
    Objective,
    StarInstance,
    objective_value,
)
from gbmech.instances import gen_local_lb, gen_random, gen_star_lb
from gbmech.oracle import (
    ORACLE_CAPACITY,
    is_degenerate,
    optimal_allocation,
    optimal_value,
    ratio,
    search_space,
    star_makespan_optimum,
)

OBJECTIVES = [
    ("makespan", None, Objective.makespan()),
    ("sum_min", None, Objective.sum_min()),
    ("lp_min", 2.0, Objective.lp_min(2.0)),
    ("lp_min", 0.5, Objective.lp_min(0.5)),
    ("lp_max", 2.0, Objective.lp_max(2.0)),
]


@pytest.mark.parametrize(
    "inst, opt",
    [
        (StarInstance((1.0, 2.0), (2.0, 4.0)), 2.0),
        (gen_star_lb(10, 2.0), 512.0),
        (gen_local_lb(16), 1.0),
    ],
    ids=["small", "geometric", "local"],
)
def test_examples(inst, opt):
    assert optimal_value(inst, Objective.makespan()) == pytest.approx(opt, abs=1e-12)


def test_small_example_allocation():
    alloc, _ = optimal_allocation(StarInstance((1.0, 2.0), (2.0, 4.0)), Objective.makespan())
    assert alloc.assignment == (1, 0)


@pytest.mark.parametrize("kind, p, obj", OBJECTIVES, ids=["makespan", "sum", "l2", "l0.5", "max-l2"])
def test_matches_bruteforce_on_every_shape(kind, p, obj):
    rng = np.random.default_rng(7)
    for shape in ("star", "hyperstar", "graph", "multigraph"):
        for seed in range(25):
            if shape == "star":
                inst = gen_random("star", seed=seed, m=int(rng.integers(1, 7)))
            elif shape == "hyperstar":
                inst = gen_random("hyperstar", seed=seed, k=int(rng.integers(1, 4)), m=int(rng.integers(1, 5)))
            elif shape == "graph":
                inst = gen_random("graph", seed=seed, n=5, q=0.6)
            else:
                inst = gen_random("multigraph", seed=seed, n=4, q=0.6, w=2)
            if inst.n_tasks == 0:
                continue
            alloc, val = optimal_allocation(inst, obj)
            assert val == pytest.approx(brute.opt_value(inst, kind, p), rel=1e-12, abs=1e-12)
            assert objective_value(inst, alloc, obj) == pytest.approx(val, rel=1e-12, abs=1e-12)


def test_oracle_respects_eligibility():
    inst = HyperstarInstance(((1.0, math.inf), (math.inf, 1.0)), (5.0, 5.0))
    alloc, val = optimal_allocation(inst, Objective.makespan())
    assert alloc.assignment == (0, 1) and val == 1.0
    g = GraphInstance(3, (Edge(0, 1, 3.0, 3.0), Edge(1, 2, 1.0, 9.0)))
    alloc, _ = optimal_allocation(g, Objective.makespan())
    assert all(a in (e.u, e.v) for a, e in zip(alloc.assignment, g.edges))
    assert alloc.assignment == (0, 1)


def test_tie_goes_to_first_enumerated():
    alloc, _ = optimal_allocation(StarInstance((1.0,), (1.0,)), Objective.makespan())
    assert alloc.assignment == (1,)


def test_capacity():
    assert search_space(HyperstarInstance(((1.0,) * 3,) * 2, (1.0,) * 3)) == 27
    assert ORACLE_CAPACITY == 1 << 24
    with pytest.raises(CapacityError) as info:
        optimal_value(StarInstance((1.0,) * 25, (1.0,) * 25), Objective.makespan())
    assert info.value.size == 1 << 25


@pytest.mark.parametrize(
    "alg, opt, maximize, want",
    [(1023.0, 512.0, False, 1.998046875), (3.0, 3.0, False, 1.0), (0.0, 0.0, False, 1.0),
     (1.0, math.sqrt(2), True, math.sqrt(2)), (math.inf, math.inf, False, 1.0)],
)
def test_ratio_conventions(alg, opt, maximize, want):
    assert ratio(alg, opt, maximize) == pytest.approx(want, abs=1e-15)


def test_degenerate_ratio(caplog):
    with pytest.raises(DegenerateInstanceError):
        ratio(1.0, 0.0)
    with pytest.raises(DegenerateInstanceError):
        ratio(0.0, 1.0, Objective.lp_max(2.0))
    with caplog.at_level(logging.INFO, logger="gbmech.oracle"):
        ratio(0.0, 0.0)
    assert "degenerate" in caplog.text
    assert is_degenerate(1.0, 0.0) and not is_degenerate(1.0, 2.0)
    assert is_degenerate(0.0, 1.0, True)


def test_star_makespan_optimum_matches_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(500):
        m = int(rng.integers(1, 9))
        if rng.random() < 0.5:
            r, ell = rng.integers(0, 4, m).astype(float), rng.integers(0, 4, m).astype(float)
        else:
            r, ell = rng.uniform(0, 2, m), rng.uniform(0, 2, m)
        if rng.random() < 0.1:
            ell[0] = math.inf
        inst = StarInstance(tuple(r), tuple(ell))
        alloc, val = star_makespan_optimum(inst)
        assert val == brute.star_opt(inst.root_costs, inst.leaf_costs)
        assert objective_value(inst, alloc, Objective.makespan()) == val


def test_star_makespan_optimum_beyond_capacity():
    _, val = star_makespan_optimum(gen_local_lb(25))
    assert val == 1.0
