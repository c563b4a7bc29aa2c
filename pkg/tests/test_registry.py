import math

import pytest

from gbmech.core import (
    Edge,
    GraphInstance,
    HyperstarInstance,
    InapplicableError,
    StarInstance,
    StructuralError,
    root_set,
)
from gbmech.mechanisms import SHIPPED, get_mechanism, payments
from gbmech.mechanisms.vcg import vcg_allocate, vcg_payments


@pytest.mark.parametrize(
    "inst, expected",
    [
        (StarInstance((0.25, 0.25), (1.0, 1.0)), (0, 0)),
        (GraphInstance(2, (Edge(0, 1, 2.0, 1.0),)), (1,)),
        (StarInstance((1.0, 1.0), (1.0, 2.0)), (0, 0)),
        (HyperstarInstance(((3.0, 1.0), (1.0, 3.0)), (2.0, 2.0)), (1, 0)),
    ],
)
def test_vcg_greedy(inst, expected):
    assert vcg_allocate(inst).assignment == expected


def test_vcg_local_lower_bound():
    inst = StarInstance((0.25,) * 16, (1.0,) * 16)
    alloc = vcg_allocate(inst)
    assert root_set(alloc) == frozenset(range(16))


def test_vcg_clarke_payments():
    inst = StarInstance((1.0, 3.0), (2.0, 1.0))
    alloc = vcg_allocate(inst)
    assert vcg_payments(inst, alloc) == [2.0, 0.0, 3.0]
    hs = HyperstarInstance(((3.0,), (1.0,)), (2.0,))
    assert vcg_payments(hs, vcg_allocate(hs)) == [0.0, 2.0, 0.0]


@pytest.mark.parametrize("name", SHIPPED)
def test_every_shipped_mechanism_runs(name):
    mech = get_mechanism(name)
    inst = StarInstance((1.0, 2.0, 0.5), (2.0, 1.0, 3.0))
    alloc, pay = mech.run(inst)
    assert len(alloc.assignment) == 3 and len(pay) == 4
    assert all(x >= 0 and not math.isnan(x) for x in pay)
    assert payments(inst, mech, alloc) == pay


def test_labels_and_params():
    assert get_mechanism("hybrid-lp", p=3).label == "hybrid-lp(p=3.0)"
    assert get_mechanism("star-cover", decomposition="orientation").params == {"decomposition": "orientation"}
    assert get_mechanism("hybrid-lp-max").objective.maximize
    assert get_mechanism("all-or-nothing").sense == "value"


def test_inapplicable_and_unknown():
    with pytest.raises(InapplicableError):
        get_mechanism("hybrid-max").allocate(HyperstarInstance(((1.0,),), (1.0,)))
    with pytest.raises(InapplicableError):
        get_mechanism("hybrid-max").allocate(GraphInstance(2, (Edge(0, 1, 1.0, 1.0),)))
    with pytest.raises(StructuralError):
        get_mechanism("median")
    with pytest.raises(StructuralError):
        get_mechanism("all-or-nothing", p=0.5)


def test_payments_reject_foreign_allocation():
    from gbmech.core import Allocation

    mech = get_mechanism("hybrid-max")
    with pytest.raises(StructuralError):
        mech.payments(StarInstance((1.0,), (1.0,)), Allocation((2,)))


def test_hyperstar_mechanism_accepts_stars():
    mech = get_mechanism("hyperstar-hybrid")
    inst = StarInstance((1.0, 5.0), (6.0, 4.0))
    assert mech.allocate(inst) == get_mechanism("hybrid-max").allocate(inst)
