"""Executable truthfulness checks for allocation rules and payment schemes.

Mechanisms are treated as black boxes: anything with ``allocate(inst)`` (and
``payments(inst, alloc)`` for utility checks), or a bare callable mapping an
instance to an :class:`Allocation`. Players are machines; a player's bid is
its cost (or value) vector over the tasks it may receive, in the order of
``inst.tasks_of(player)``.

In cost sense a player pays its processing time and is paid by the
mechanism; in value sense it enjoys its bid and is charged.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from gbmech.core import (
    TOL,
    Allocation,
    Edge,
    GraphInstance,
    HyperstarInstance,
    Objective,
    SchedulingInstance,
    StarInstance,
)
from gbmech.instances import gen_random, instance_to_dict
from gbmech.mechanisms.offsets import DEFAULT_TIE, CustomG, GFunctionSpec, TieBreakPolicy
from gbmech.mechanisms.registry import Mechanism
from gbmech.mechanisms.star import critical_value, hybrid_star_allocate
from gbmech.mechanisms.vcg import vcg_payments

GRID = tuple(0.5 * k for k in range(7))  # 0, 0.5, ..., 3
EPS = 1e-6


@dataclass
class VerificationReport:
    property: str
    passed: bool
    trials: int = 0
    violations: int = 0
    counterexample: dict | None = None
    info: dict = field(default_factory=dict)
    mechanism: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        head = f"{status} {self.property}"
        if self.mechanism:
            head += f" [{self.mechanism}]"
        extra = ", ".join(f"{k}={v}" for k, v in self.info.items())
        tail = f" trials={self.trials} violations={self.violations}"
        return head + tail + (f" ({extra})" if extra else "")

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "mechanism": self.mechanism,
            "passed": self.passed,
            "trials": self.trials,
            "violations": self.violations,
            "counterexample": self.counterexample,
            "info": self.info,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _transcript(inst: SchedulingInstance, player: int, bid, deviation, **observed) -> dict:
    """Replayable record: both profiles in the instance file format."""
    return {
        "instance": instance_to_dict(inst.with_bid(player, tuple(bid))),
        "deviation_instance": instance_to_dict(inst.with_bid(player, tuple(deviation))),
        "player": player,
        "bid": list(bid),
        "deviation": list(deviation),
        "observed": observed,
    }


# -- black-box plumbing -------------------------------------------------------

def _allocator(mech) -> Callable[[SchedulingInstance], Allocation]:
    if hasattr(mech, "allocate"):
        return mech.allocate
    return mech


def _sense(mech, sense: str | None) -> str:
    if sense is not None:
        return sense
    return getattr(mech, "sense", "cost")


def _name(mech) -> str:
    return getattr(mech, "label", getattr(mech, "__name__", "custom"))


def _bundle_cost(inst: SchedulingInstance, player: int, bid: Sequence[float], bundle: frozenset[int]) -> float:
    total = 0.0
    for t, b in zip(inst.tasks_of(player), bid):
        if t in bundle:
            total = total + b
    return total


def _sub(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return a - b


# -- single checks --------------------------------------------------------------

def check_wmon(mech, inst: SchedulingInstance, player: int, t_i: Sequence[float], t_i2: Sequence[float],
               sense: str | None = None) -> VerificationReport:
    """``t(X) - t(X') <= t'(X) - t'(X')`` (reversed in value sense)."""
    sense = _sense(mech, sense)
    alloc = _allocator(mech)
    x = alloc(inst.with_bid(player, tuple(t_i))).bundle(player)
    x2 = alloc(inst.with_bid(player, tuple(t_i2))).bundle(player)
    lhs = _sub(_bundle_cost(inst, player, t_i, x), _bundle_cost(inst, player, t_i, x2))
    rhs = _sub(_bundle_cost(inst, player, t_i2, x), _bundle_cost(inst, player, t_i2, x2))
    if math.isnan(lhs) or math.isnan(rhs):
        ok = True
    elif sense == "cost":
        ok = lhs <= rhs + TOL
    else:
        ok = lhs >= rhs - TOL
    cx = None if ok else _transcript(inst, player, t_i, t_i2, bundle=sorted(x), deviation_bundle=sorted(x2),
                                     lhs=lhs, rhs=rhs)
    return VerificationReport("wmon", ok, 1, 0 if ok else 1, cx, mechanism=_name(mech))


def perturbed_bid(inst: SchedulingInstance, player: int, bundle: frozenset[int], eps: float = EPS,
                  sense: str = "cost") -> tuple[float, ...]:
    """Make the current bundle more attractive by ``eps`` per task and the rest less."""
    out = []
    for t, b in zip(inst.tasks_of(player), inst.bid_of(player)):
        better = (t in bundle) == (sense == "cost")
        out.append(max(0.0, b - eps) if better else b + eps)
    return tuple(out)


def check_perturbation_lemma(mech, inst: SchedulingInstance, player: int, eps: float = EPS,
                             sense: str | None = None) -> VerificationReport:
    """After the perturbation a monotone rule must keep the player's bundle."""
    sense = _sense(mech, sense)
    alloc = _allocator(mech)
    before = alloc(inst).bundle(player)
    bid = perturbed_bid(inst, player, before, eps, sense)
    after = alloc(inst.with_bid(player, bid)).bundle(player)
    ok = before == after
    cx = None if ok else _transcript(inst, player, inst.bid_of(player), bid,
                                     bundle=sorted(before), deviation_bundle=sorted(after))
    return VerificationReport("perturbation", ok, 1, 0 if ok else 1, cx, mechanism=_name(mech))


def check_leaf_monotone(mech, inst: SchedulingInstance, leaf: int, bids: Iterable[float] | None = None,
                        sense: str | None = None) -> VerificationReport:
    """A single-task player that wins at some bid must win at every better bid."""
    sense = _sense(mech, sense)
    alloc = _allocator(mech)
    (task,) = inst.tasks_of(leaf)
    if bids is None:
        bids = GRID
    # walk from the worst bid to the best one
    seq = sorted(set(float(b) for b in bids), reverse=(sense == "cost"))
    won_at = None
    for b in seq:
        wins = task in alloc(inst.with_bid(leaf, (b,))).bundle(leaf)
        if wins and won_at is None:
            won_at = b
        elif not wins and won_at is not None:
            cx = _transcript(inst, leaf, (won_at,), (b,), wins_at=won_at, loses_at=b)
            return VerificationReport("leaf-monotone", False, len(seq), 1, cx, mechanism=_name(mech))
    return VerificationReport("leaf-monotone", True, len(seq), 0, mechanism=_name(mech))


def _utility(inst, player, true_bid, alloc: Allocation, pay: Sequence[float], sense: str) -> float:
    value = _bundle_cost(inst, player, true_bid, alloc.bundle(player))
    return _sub(pay[player], value) if sense == "cost" else _sub(value, pay[player])


def check_truthful_utilities(mech, inst: SchedulingInstance, deviations: Iterable[Sequence[float]] | None = None,
                             players: Iterable[int] | None = None, sense: str | None = None
                             ) -> VerificationReport:
    """Truthful utility is at least the utility of every listed deviation.

    ``deviations`` are full bid vectors; each is tried for every player whose
    bid has the same length. By default every grid vector is tried.
    """
    sense = _sense(mech, sense)
    truth_alloc, truth_pay = mech.allocate(inst), mech.payments(inst, mech.allocate(inst))
    players = range(inst.n_machines) if players is None else players
    trials = viol = 0
    cx = None
    for i in players:
        true_bid = inst.bid_of(i)
        u_true = _utility(inst, i, true_bid, truth_alloc, truth_pay, sense)
        devs = deviations if deviations is not None else itertools.product(GRID, repeat=len(true_bid))
        for dev in devs:
            if len(dev) != len(true_bid):
                continue
            dev_inst = inst.with_bid(i, tuple(dev))
            a = mech.allocate(dev_inst)
            p = mech.payments(dev_inst, a)
            u_dev = _utility(inst, i, true_bid, a, p, sense)
            trials += 1
            if u_dev > u_true + TOL:
                viol += 1
                if cx is None:
                    cx = _transcript(inst, i, true_bid, dev, truthful_utility=u_true, deviating_utility=u_dev)
    return VerificationReport("utilities", viol == 0, trials, viol, cx, mechanism=_name(mech))


def check_locality(mech, inst: SchedulingInstance, player: int, t_i: Sequence[float], t_i2: Sequence[float]
                   ) -> VerificationReport:
    """Fails (informationally) when the player's bundle is fixed but someone else's moves."""
    alloc = _allocator(mech)
    a = alloc(inst.with_bid(player, tuple(t_i)))
    b = alloc(inst.with_bid(player, tuple(t_i2)))
    if a.bundle(player) != b.bundle(player) or a == b:
        return VerificationReport("locality", True, 1, 0, mechanism=_name(mech))
    cx = _transcript(inst, player, t_i, t_i2, allocation=list(a.assignment), deviation_allocation=list(b.assignment))
    return VerificationReport("locality", False, 1, 1, cx, info={"verdict": "non-local"}, mechanism=_name(mech))


def classify_psi(g: GFunctionSpec, contexts: Iterable[tuple[Sequence[float], Sequence[float]]],
                 ell_grid: Sequence[float], i: int = 0) -> tuple[str, dict | None]:
    """``strict``, ``monotone`` or ``neither`` for ``psi_i`` as a function of ``ell_i``."""
    grid = sorted(ell_grid)
    strict = True
    for r, ell in contexts:
        prev = None
        for x in grid:
            e = list(ell)
            e[i] = x
            psi = critical_value(StarInstance(tuple(r), tuple(e)), g, i, method="enumerate")
            if prev is not None:
                if psi < prev[1] - TOL:
                    return "neither", {"root_costs": list(r), "leaf_costs": list(e), "task": i,
                                       "ell_pair": [prev[0], x], "psi_pair": [prev[1], psi]}
                if psi <= prev[1] + TOL:
                    strict = False
            prev = (x, psi)
    return ("strict" if strict else "monotone"), None


def check_psi_monotone(g: GFunctionSpec, contexts, ell_grid: Sequence[float] = GRID, i: int = 0
                       ) -> VerificationReport:
    """Pass iff ``psi_i`` never decreases in ``ell_i``; ``info['strict']`` reports strictness."""
    contexts = list(contexts)
    kind, witness = classify_psi(g, contexts, ell_grid, i)
    return VerificationReport(
        "psi-monotone", kind != "neither", len(contexts) * len(ell_grid), int(kind == "neither"),
        witness, info={"classification": kind, "strict": kind == "strict"}, mechanism=g.label,
    )


def check_condition_c(g: GFunctionSpec, ell_grid: Sequence[float], m: int, i: int = 0) -> VerificationReport:
    """``g_T`` nondecreasing in ``ell_i`` when ``i`` is outside ``T`` and constant otherwise."""
    grid = sorted(ell_grid)
    trials = viol = 0
    cx = None
    for rest in itertools.product(grid, repeat=m - 1):
        for mask in range(1 << m):
            prev = None
            for x in grid:
                ell = list(rest[:i]) + [x] + list(rest[i:])
                v = g.value(mask, ell)
                trials += 1
                if prev is not None:
                    inside = (mask >> i) & 1
                    bad = abs(v - prev[1]) > TOL if inside else v < prev[1] - TOL
                    if bad:
                        viol += 1
                        if cx is None:
                            cx = {"set": sorted(j for j in range(m) if (mask >> j) & 1), "task": i,
                                  "ell_other": list(rest), "ell_i": [prev[0], x], "g": [prev[1], v]}
                prev = (x, v)
    return VerificationReport("condition-c", viol == 0, trials, viol, cx, mechanism=g.label)


def check_psi_threshold(g: GFunctionSpec, inst: StarInstance, i: int, eps: float = EPS,
                        tie: TieBreakPolicy = DEFAULT_TIE) -> VerificationReport:
    """``psi_i >= 0``; the root wins task ``i`` at ``psi_i - eps`` and loses it at ``psi_i + eps``."""
    psi = critical_value(inst, g, i, tie, method="enumerate" if not g.closed_form else "auto")
    trials, failures = 1, []
    if psi < -TOL:
        failures.append(("negative", psi))
    probes = []
    if math.isinf(psi):
        probes.append((inst.root_costs[i] + 1.0, True))
    else:
        if psi - eps >= 0:
            probes.append((psi - eps, True))
        probes.append((psi + eps, False))
    for r_i, root_wins in probes:
        r = list(inst.root_costs)
        r[i] = r_i
        alloc = hybrid_star_allocate(StarInstance(tuple(r), inst.leaf_costs), g, tie)
        trials += 1
        if (alloc.assignment[i] == 0) != root_wins:
            failures.append(("flip", r_i))
    cx = None
    if failures:
        cx = {"instance": instance_to_dict(inst), "task": i, "psi": psi, "failures": failures}
    return VerificationReport("psi-threshold", not failures, trials, len(failures), cx,
                              info={"psi": psi}, mechanism=g.label)


# -- fixtures -------------------------------------------------------------------

def _anti_alloc(inst: StarInstance) -> Allocation:
    out = []
    for j in range(inst.m):
        r, l = inst.root_costs[j], inst.leaf_costs[j]
        root = (1.0 <= r <= 2.0) if j == 0 else r <= l
        out.append(0 if root else j + 1)
    return Allocation(tuple(out))


def anti_monotone_mechanism() -> Mechanism:
    """Negative control: the root gets task 0 exactly when ``1 <= r_0 <= 2``.

    Other tasks go to the cheaper side; payments are second prices, so the
    rule looks like VCG but is not monotone in ``r_0``.
    """
    return Mechanism("anti-monotone", "cost", Objective.makespan(), (StarInstance,),
                     _anti_alloc, lambda inst, a: vcg_payments(inst, a))


def zero_payment_mechanism(mech: Mechanism) -> Mechanism:
    """Same allocation, no payments (negative control for utility checks)."""
    return Mechanism(mech.name + "/unpaid", mech.sense, mech.objective, mech.accepts, mech.allocate_fn,
                     lambda inst, a: [0.0] * inst.n_machines, mech.params)


def counterexample_g() -> CustomG:
    """Two-task offsets whose critical value for task 0 is identically 1.

    ``g_{01} = 0``, ``g_0 = ell_1 + 1/ell_0``, ``g_1 = 1``,
    ``g_empty = ell_1 + 1/ell_0 + 1`` (``ell_0 > 0``).
    """
    def fn(mask, ell):
        inv = 1.0 / ell[0] if ell[0] > 0 else math.inf
        return {3: 0.0, 1: ell[1] + inv, 2: 1.0, 0: ell[1] + inv + 1.0}[mask]

    return CustomG(fn, "counterexample")


def decreasing_psi_g() -> CustomG:
    """One task with ``g_empty = 1/(1 + ell_0)``: the critical value falls as the leaf bid rises."""
    return CustomG(lambda mask, ell: 0.0 if mask else 1.0 / (1.0 + ell[0]), "decreasing-psi")


def offset_mechanism(g: GFunctionSpec) -> Mechanism:
    """Star Hybrid rule with arbitrary offsets (for auditing fixtures)."""
    from gbmech.mechanisms.star import hybrid_star_payments

    return Mechanism(f"hybrid[{g.label}]", "cost", Objective.makespan(), (StarInstance,),
                     lambda inst: hybrid_star_allocate(inst, g),
                     lambda inst, a: hybrid_star_payments(inst, a, g))


# -- batteries --------------------------------------------------------------------

@dataclass
class _Shape:
    """Exhaustive profile space for one instance shape."""

    label: str
    dims: int
    build: Callable[[tuple], SchedulingInstance]
    players: list[tuple[int, list[int]]]  # (player, coordinates of its bid)


def _shapes(mech: Mechanism) -> list[_Shape]:
    out = []
    if mech.applicable(StarInstance((0.0, 0.0), (0.0, 0.0))):
        out.append(_Shape("star m=2", 4, lambda v: StarInstance(v[0:2], v[2:4]),
                          [(0, [0, 1]), (1, [2]), (2, [3])]))
    if mech.applicable(HyperstarInstance(((0.0, 0.0), (0.0, 0.0)), (0.0, 0.0))):
        out.append(_Shape("hyperstar k=2 m=2", 6, lambda v: HyperstarInstance((v[0:2], v[2:4]), v[4:6]),
                          [(0, [0, 1]), (1, [2, 3]), (2, [4]), (3, [5])]))
    return out


def _first_violation(flags: np.ndarray):
    idx = np.argwhere(flags)
    return tuple(int(x) for x in idx[0]) if len(idx) else None


def exhaustive_battery(mech: Mechanism, grid: Sequence[float] = GRID, perturbation_samples: int = 2000,
                       seed: int = 0) -> list[VerificationReport]:
    """WMON, utilities, leaf monotonicity, perturbation and locality over a full grid.

    Every profile of the shape is evaluated once; pairwise conditions are
    then checked with array arithmetic over (context, bid, deviation).
    """
    grid = tuple(float(x) for x in grid)
    G = len(grid)
    reports = []
    rng = np.random.default_rng(seed)
    for shape in _shapes(mech):
        D = shape.dims
        profiles = list(itertools.product(range(G), repeat=D))
        n_players = max(p for p, _ in shape.players) + 1
        first = shape.build(tuple(grid[0] for _ in range(D)))
        m = first.n_tasks
        assign = np.zeros((len(profiles), m), dtype=np.int64)
        pay = np.zeros((len(profiles), n_players))
        for k, idx in enumerate(profiles):
            inst = shape.build(tuple(grid[t] for t in idx))
            a, p = mech.run(inst)
            assign[k] = a.assignment
            pay[k] = p
        assign = assign.reshape((G,) * D + (m,))
        pay = pay.reshape((G,) * D + (n_players,))
        sense = mech.sense
        grid_arr = np.asarray(grid)
        label = f"{mech.label} on {shape.label}"
        wmon_v = util_v = mono_v = 0
        wmon_t = util_t = mono_t = 0
        wmon_cx = util_cx = mono_cx = None
        local_witness = None
        for player, coords in shape.players:
            tasks = first.tasks_of(player)
            others = [d for d in range(D) if d not in coords]
            perm = others + coords
            # x[ctx, a, c]: does the player get its c-th task at own bid a?
            x = np.stack([(assign[..., t] == player) for t in tasks], axis=-1).transpose(perm + [D])
            x = x.reshape(G ** len(others), G ** len(coords), len(tasks)).astype(float)
            pp = pay[..., player].transpose(perm).reshape(G ** len(others), G ** len(coords))
            bids = np.array(list(itertools.product(grid_arr, repeat=len(coords))))  # (A, c)
            cost = np.einsum("ac,kbc->kab", bids, x)  # own bid a, outcome of bid b
            diag = np.einsum("kaa->ka", cost)
            lhs = diag[:, :, None] - cost
            rhs = cost.transpose(0, 2, 1) - diag[:, None, :]
            bad = lhs > rhs + TOL if sense == "cost" else lhs < rhs - TOL
            u = (pp[:, None, :] - cost) if sense == "cost" else (cost - pp[:, None, :])
            with np.errstate(invalid="ignore"):
                ubad = u > np.einsum("kaa->ka", u)[:, :, None] + TOL
            wmon_t += bad.size
            util_t += ubad.size
            wmon_v += int(bad.sum())
            util_v += int(ubad.sum())
            ctx_shape = (G,) * len(others)

            def profile_bid(k, a):
                ctx = np.unravel_index(k, ctx_shape) if others else ()
                vals = [0.0] * D
                for d, t in zip(others, ctx):
                    vals[d] = grid[t]
                own = bids[a]
                for d, v in zip(coords, own):
                    vals[d] = float(v)
                return shape.build(tuple(vals)), tuple(float(v) for v in own)

            if wmon_cx is None and (hit := _first_violation(bad)) is not None:
                k, a, b = hit
                inst, own = profile_bid(k, a)
                wmon_cx = _transcript(inst, player, own, tuple(float(v) for v in bids[b]),
                                      lhs=float(lhs[hit]), rhs=float(rhs[hit]))
            if util_cx is None and (hit := _first_violation(ubad)) is not None:
                k, a, b = hit
                inst, own = profile_bid(k, a)
                util_cx = _transcript(inst, player, own, tuple(float(v) for v in bids[b]),
                                      truthful_utility=float(u[k, a, a]), deviating_utility=float(u[hit]))
            if len(tasks) == 1:
                win = x[:, :, 0] > 0.5  # bids ascending along axis 1
                worse = win[:, 1:] & ~win[:, :-1] if sense == "cost" else win[:, :-1] & ~win[:, 1:]
                mono_t += win.size
                mono_v += int(worse.sum())
                if mono_cx is None and (hit := _first_violation(worse)) is not None:
                    k, a = hit
                    inst, own = profile_bid(k, a)
                    mono_cx = _transcript(inst, player, own, (grid[a + 1],), note="win status not monotone")
            if local_witness is None:
                flat_assign = assign.transpose(perm + [D]).reshape(G ** len(others), G ** len(coords), m)
                same_bundle = np.all(x[:, :, None, :] == x[:, None, :, :], axis=-1)
                diff_alloc = np.any(flat_assign[:, :, None, :] != flat_assign[:, None, :, :], axis=-1)
                if (hit := _first_violation(same_bundle & diff_alloc)) is not None:
                    k, a, b = hit
                    inst, own = profile_bid(k, a)
                    local_witness = _transcript(inst, player, own, tuple(float(v) for v in bids[b]))
        reports.append(VerificationReport("wmon", wmon_v == 0, wmon_t, wmon_v, wmon_cx, mechanism=label))
        reports.append(VerificationReport("utilities", util_v == 0, util_t, util_v, util_cx, mechanism=label))
        reports.append(VerificationReport("leaf-monotone", mono_v == 0, mono_t, mono_v, mono_cx, mechanism=label))
        # perturbation on grid profiles where no bid has to be clamped at 0
        picks = rng.permutation(len(profiles))[:perturbation_samples]
        p_t = p_v = 0
        p_cx = None
        for k in picks:
            inst = shape.build(tuple(grid[t] for t in profiles[k]))
            alloc = mech.allocate(inst)
            for player, _ in shape.players:
                bundle = alloc.bundle(player)
                if any(b == 0 and ((t in bundle) == (sense == "cost"))
                       for t, b in zip(inst.tasks_of(player), inst.bid_of(player))):
                    continue
                rep = check_perturbation_lemma(mech, inst, player)
                p_t += 1
                if not rep.passed:
                    p_v += 1
                    p_cx = p_cx or rep.counterexample
        reports.append(VerificationReport("perturbation", p_v == 0, p_t, p_v, p_cx, mechanism=label))
        info = {"verdict": "non-local" if local_witness else "local"}
        reports.append(VerificationReport("locality", True, len(profiles), 0, local_witness, info=info,
                                          mechanism=label))
    return reports


_PROBE_GRAPH = GraphInstance(2, (Edge(0, 1, 0.0, 0.0),))


def _random_instance(kind: str, rng: np.random.Generator, max_m: int, high: float) -> SchedulingInstance:
    m = int(rng.integers(1, max_m + 1))
    if kind in ("tree", "multigraph"):
        params = {"n": m + 1} if kind == "tree" else {"n": 4, "q": 0.6, "w": 2}
        return gen_random(kind, int(rng.integers(1 << 31)), lo=0.0, hi=high, **params)
    if kind == "star":
        return StarInstance(tuple(rng.uniform(0, high, m)), tuple(rng.uniform(0, high, m)))
    k = int(rng.integers(1, 4))
    return HyperstarInstance(tuple(tuple(rng.uniform(0, high, m)) for _ in range(k)),
                             tuple(rng.uniform(0, high, m)))


def random_battery(mech: Mechanism, trials: int = 1000, max_m: int = 6, seed: int = 0,
                   high: float = 4.0, bids_per_context: int = 10) -> list[VerificationReport]:
    """Random profiles (uniform on ``[0, high]``): WMON, utilities and perturbation.

    Each context fixes the other players and draws ``bids_per_context``
    bids for one player; every ordered pair of distinct bids is one WMON
    and one utility trial. Sampling continues until ``trials`` pairs have
    been checked. The perturbation check runs once per context.
    """
    rng = np.random.default_rng(seed)
    kinds = [k for k, probe in (("star", StarInstance((0.0,), (0.0,))),
                                ("hyperstar", HyperstarInstance(((0.0,),), (0.0,))),
                                ("tree", _PROBE_GRAPH), ("multigraph", _PROBE_GRAPH))
             if mech.applicable(probe)]
    K = max(2, bids_per_context)
    sense = mech.sense
    counts = {"wmon": [0, 0, None], "utilities": [0, 0, None], "perturbation": [0, 0, None]}
    ctx = 0
    while counts["wmon"][0] < trials:
        inst = _random_instance(kinds[ctx % len(kinds)], rng, max_m, high)
        ctx += 1
        busy = [i for i in range(inst.n_machines) if inst.tasks_of(i)]
        if not busy:
            continue
        player = busy[int(rng.integers(len(busy)))]
        tasks = inst.tasks_of(player)
        bids = np.vstack([inst.bid_of(player), rng.uniform(0, high, (K - 1, len(tasks)))])
        x = np.zeros((K, len(tasks)))
        pay = np.zeros(K)
        for a in range(K):
            alloc, p = mech.run(inst.with_bid(player, tuple(float(v) for v in bids[a])))
            x[a] = [alloc.assignment[t] == player for t in tasks]
            pay[a] = p[player]
        cost = bids @ x.T  # cost[a, b]: own bid a, outcome of bid b
        diag = np.diag(cost)
        lhs = diag[:, None] - cost
        rhs = cost.T - diag[None, :]
        off = ~np.eye(K, dtype=bool)
        bad = (lhs > rhs + TOL if sense == "cost" else lhs < rhs - TOL) & off
        u = pay[None, :] - cost if sense == "cost" else cost - pay[None, :]
        ubad = (u > np.diag(u)[:, None] + TOL) & off
        for name, flags, observed in (("wmon", bad, (lhs, rhs)), ("utilities", ubad, (u, None))):
            c = counts[name]
            c[0] += int(off.sum())
            c[1] += int(flags.sum())
            if c[2] is None and (hit := _first_violation(flags)) is not None:
                a, b = hit
                c[2] = _transcript(inst, player, tuple(bids[a]), tuple(bids[b]),
                                   lhs=float(observed[0][hit]),
                                   rhs=None if observed[1] is None else float(observed[1][hit]))
        rep = check_perturbation_lemma(mech, inst, player)
        c = counts["perturbation"]
        c[0] += 1
        if not rep.passed:
            c[1] += 1
            c[2] = c[2] or rep.counterexample
    return [VerificationReport(name, v == 0, t, v, cx, info={"contexts": ctx}, mechanism=f"{mech.label} random")
            for name, (t, v, cx) in counts.items()]


def run_battery(mech: Mechanism, scope: str = "exhaustive", seed: int = 0, trials: int = 1000
                ) -> list[VerificationReport]:
    if scope == "exhaustive":
        return exhaustive_battery(mech, seed=seed)
    if scope == "random":
        return random_battery(mech, trials=trials, seed=seed)
    if scope == "all":
        return exhaustive_battery(mech, seed=seed) + random_battery(mech, trials=trials, seed=seed)
    raise ValueError(f"unknown scope {scope!r}")


def battery_passed(reports: Iterable[VerificationReport]) -> bool:
    """Locality is informational and never fails a battery."""
    return all(r.passed for r in reports if r.property != "locality")


__all__ = [
    "GRID", "VerificationReport", "anti_monotone_mechanism", "battery_passed", "check_condition_c",
    "check_leaf_monotone", "check_locality", "check_perturbation_lemma", "check_psi_monotone", "check_psi_threshold",
    "check_truthful_utilities", "check_wmon", "classify_psi", "counterexample_g", "decreasing_psi_g",
    "exhaustive_battery", "offset_mechanism", "perturbed_bid", "random_battery", "run_battery",
    "zero_payment_mechanism",
]

