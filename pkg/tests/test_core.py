import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbmech.core import (
    INF,
    Allocation,
    CapacityError,
    Edge,
    GraphInstance,
    HyperstarInstance,
    Objective,
    StarInstance,
    StructuralError,
    as_cost,
    loads,
    mask_to_set,
    objective_value,
    require_enumerable,
    root_set,
    set_to_mask,
    star_allocation,
    star_as_graph,
    validate_allocation,
    weighted,
)


@pytest.mark.parametrize("raw, expected", [(0, 0.0), (2.5, 2.5), ("inf", INF), ("Infinity", INF), (INF, INF)])
def test_as_cost_accepts(raw, expected):
    assert as_cost(raw) == expected


@pytest.mark.parametrize("raw", [-1, float("nan"), "abc", None, "-inf"])
def test_as_cost_rejects(raw):
    with pytest.raises(StructuralError):
        as_cost(raw)


def test_infinite_costs_saturate():
    inst = StarInstance((INF, 1.0), (1.0, 1.0))
    alloc = star_allocation(2, {0, 1})
    assert objective_value(inst, alloc, Objective.makespan()) == INF
    assert objective_value(inst, alloc, Objective.lp_min(2.0)) == INF
    assert objective_value(inst, alloc, Objective.sum_min()) == INF


def test_weighted_zero_times_inf():
    assert weighted(0.0, INF) == 0.0
    assert weighted(2.0, 3.0) == 6.0


@pytest.mark.parametrize("mask", [0, 1, 5, 0b101101, (1 << 20) - 1])
def test_mask_roundtrip(mask):
    assert set_to_mask(mask_to_set(mask)) == mask


def test_star_shape_checks():
    with pytest.raises(StructuralError):
        StarInstance((1.0,), (1.0, 2.0))
    with pytest.raises(StructuralError):
        StarInstance((), ())


def test_hyperstar_shape_checks():
    HyperstarInstance(((1.0, 2.0), (3.0, 4.0)), (1.0, 1.0), (1.0, 0.0))
    with pytest.raises(StructuralError):
        HyperstarInstance(((1.0, 2.0), (3.0,)), (1.0, 1.0))
    with pytest.raises(StructuralError):
        HyperstarInstance(((1.0, 2.0),), (1.0, 1.0), (1.0, 1.0))
    with pytest.raises(StructuralError):
        HyperstarInstance(((1.0, 2.0),), (1.0, 1.0), (-1.0,))


def test_graph_checks():
    with pytest.raises(StructuralError):
        GraphInstance(2, (Edge(0, 0, 1.0, 1.0),))
    with pytest.raises(StructuralError):
        GraphInstance(2, (Edge(0, 2, 1.0, 1.0),))
    with pytest.raises(StructuralError):
        GraphInstance(2, (Edge(0, 1, 1.0, 1.0), Edge(1, 0, 1.0, 1.0)))
    g = GraphInstance(2, (Edge(0, 1, 1.0, 1.0), Edge(1, 0, 1.0, 1.0)), multigraph=True)
    assert g.max_multiplicity() == 2


def test_eligibility_is_enforced():
    inst = StarInstance((1.0, 2.0), (2.0, 4.0))
    with pytest.raises(StructuralError):
        validate_allocation(inst, Allocation((2, 0)))
    with pytest.raises(StructuralError):
        validate_allocation(inst, Allocation((0,)))
    hs = HyperstarInstance(((1.0, 1.0), (1.0, 1.0)), (1.0, 1.0))
    validate_allocation(hs, Allocation((1, 3)))
    with pytest.raises(StructuralError):
        validate_allocation(hs, Allocation((3, 3)))


@pytest.mark.parametrize(
    "r, ell, roots, obj, expected",
    [
        ((1, 2), (2, 4), {0, 1}, Objective.makespan(), 3.0),
        ((3, 4), (3, 4), set(), Objective.lp_min(2.0), 5.0),
        ((1, 2), (2, 4), {0}, Objective.makespan(), 4.0),
    ],
)
def test_objective_examples(r, ell, roots, obj, expected):
    inst = StarInstance(r, ell)
    assert objective_value(inst, star_allocation(2, roots), obj) == pytest.approx(expected, abs=1e-9)


def test_objective_kinds():
    with pytest.raises(StructuralError):
        Objective.lp_max(0.5)
    with pytest.raises(StructuralError):
        Objective.lp_min(0.0)
    with pytest.raises(StructuralError):
        Objective("lp_min", INF)
    assert Objective.lp_min(0.5).p == 0.5
    assert Objective.lp_max(2.0).maximize and not Objective.makespan().maximize


loads_st = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=6)


@given(loads_st, st.sampled_from([Objective.makespan(), Objective.sum_min(), Objective.lp_min(0.5),
                                  Objective.lp_min(2.0), Objective.lp_max(3.0)]), st.randoms())
def test_objective_permutation_invariant(vals, obj, rnd):
    from gbmech.core import reduce_loads

    shuffled = list(vals)
    rnd.shuffle(shuffled)
    assert reduce_loads(shuffled, obj) == pytest.approx(reduce_loads(vals, obj), rel=1e-12, abs=1e-12)


@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=2, max_size=6), st.integers(0, 5),
       st.floats(0, 5, allow_nan=False), st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_lp_monotone_in_costs(ell, j, bump, p):
    m = len(ell)
    j %= m
    r = tuple(reversed(ell))
    alloc = star_allocation(m, range(0, m, 2))
    base = objective_value(StarInstance(r, tuple(ell)), alloc, Objective.lp_min(p))
    raised = list(ell)
    raised[j] += bump
    higher = objective_value(StarInstance(r, tuple(raised)), alloc, Objective.lp_min(p))
    assert higher >= base - 1e-12


def test_lp_approaches_makespan():
    rng = np.random.default_rng(7)
    for _ in range(200):
        m = int(rng.integers(1, 8))
        inst = StarInstance(tuple(rng.uniform(0, 1, m)), tuple(rng.uniform(0, 1, m)))
        alloc = star_allocation(m, [j for j in range(m) if rng.random() < 0.5])
        ls = loads(inst, alloc)
        if sorted(ls)[-1] == (sorted(ls)[-2] if len(ls) > 1 else -1):
            continue
        mk = objective_value(inst, alloc, Objective.makespan())
        lp = objective_value(inst, alloc, Objective.lp_min(64.0))
        assert abs(lp - mk) <= 0.05 * mk


def test_with_bid_roundtrip():
    inst = StarInstance((1.0, 2.0), (3.0, 4.0))
    assert inst.with_bid(0, (5.0, 6.0)).root_costs == (5.0, 6.0)
    assert inst.with_bid(2, (9.0,)).leaf_costs == (3.0, 9.0)
    hs = HyperstarInstance(((1.0, 2.0), (3.0, 4.0)), (5.0, 6.0))
    assert hs.with_bid(1, (0.0, 0.0)).root_costs[1] == (0.0, 0.0)
    assert hs.bid_of(3) == (6.0,)
    g = star_as_graph(inst)
    assert g.bid_of(0) == (1.0, 2.0) and g.bid_of(2) == (4.0,)
    assert g.with_bid(0, (7.0, 8.0)).bid_of(0) == (7.0, 8.0)


def test_root_set_helper():
    assert root_set(star_allocation(3, {0, 2})) == frozenset({0, 2})


def test_enumeration_limit_env(monkeypatch):
    require_enumerable(22)
    with pytest.raises(CapacityError) as info:
        require_enumerable(23)
    assert info.value.limit == 22 and "22" in str(info.value)
    monkeypatch.setenv("GBMECH_ENUM_LIMIT", "5")
    with pytest.raises(CapacityError):
        require_enumerable(6)
    monkeypatch.setenv("GBMECH_ENUM_LIMIT", "30")
    require_enumerable(25)


@settings(max_examples=50)
@given(st.integers(1, 6), st.integers(0, 2 ** 6 - 1))
def test_star_allocation_masks(m, mask):
    mask &= (1 << m) - 1
    alloc = star_allocation(m, mask_to_set(mask))
    assert set_to_mask(root_set(alloc)) == mask
    assert all(a in (0, j + 1) for j, a in enumerate(alloc.assignment))
