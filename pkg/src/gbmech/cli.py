"""Command line: ``gbmech solve | decompose | verify | benchmark | gen``.

Exit codes: 0 success, 1 verification failure, 2 unreadable input,
3 capacity exceeded, 4 mechanism not applicable.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from gbmech import __version__
from gbmech.core import (
    CapacityError,
    DegenerateInstanceError,
    GraphInstance,
    HyperstarInstance,
    InapplicableError,
    Objective,
    StarInstance,
    StructuralError,
    objective_value,
    star_as_graph,
)
from gbmech.decomposition import decompose
from gbmech.instances import (
    FAMILIES,
    ParseError,
    dump_instance,
    generate,
    load_instance,
    replay_lp_small_lb,
    replay_max_lb,
)
from gbmech.mechanisms import SHIPPED, get_mechanism
from gbmech.oracle import optimal_allocation, ratio

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_CAPACITY, EXIT_INAPPLICABLE = 0, 1, 2, 3, 4

CSV_COLUMNS = ("instance_id", "family", "m", "n", "k", "p", "mechanism",
               "alg_value", "opt_value", "ratio", "runtime_ms", "flag")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "inf" if math.isinf(x) else repr(x)
    return str(x)


def _json_num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _objective(args, mech) -> Objective:
    if args.objective is None:
        return mech.objective
    kind = args.objective
    if kind == "makespan":
        return Objective.makespan()
    if kind == "sum_min":
        return Objective.sum_min()
    p = 2.0 if args.p is None else args.p
    return Objective.lp_min(p) if kind == "lp_min" else Objective.lp_max(p)


def _describe(inst) -> str:
    if isinstance(inst, StarInstance):
        return f"star with {inst.m} tasks"
    if isinstance(inst, HyperstarInstance):
        return f"hyperstar with {inst.k} roots and {inst.m} tasks"
    kind = "multigraph" if inst.multigraph else "graph"
    return f"{kind} with {inst.n} nodes and {inst.m} edges"


# -- solve --------------------------------------------------------------------

def cmd_solve(args) -> int:
    inst, file_obj = load_instance(args.instance)
    mech = get_mechanism(args.mechanism, p=args.p, decomposition=args.decomposition)
    if args.objective is None and file_obj is not None:
        obj = file_obj
    else:
        obj = _objective(args, mech)
    alloc, pay = mech.run(inst)
    value = objective_value(inst, alloc, obj)
    opt = rat = None
    note = ""
    try:
        _, opt = optimal_allocation(inst, obj)
        rat = ratio(value, opt, obj)
    except CapacityError as exc:
        note = f"optimum skipped: {exc}"
    except DegenerateInstanceError as exc:
        note = f"ratio undefined: {exc}"
    if args.json:
        out = {
            "mechanism": mech.label,
            "objective": obj.to_dict(),
            "allocation": alloc.to_dict(),
            "value": _json_num(value),
            "payments": None if pay is None else [_json_num(x) for x in pay],
            "opt_value": _json_num(opt),
            "ratio": _json_num(rat),
        }
        if note:
            out["note"] = note
        print(json.dumps(out, indent=2))
        return EXIT_OK
    print(f"instance:   {_describe(inst)}")
    print(f"mechanism:  {mech.label}")
    print(f"objective:  {obj}")
    print(f"allocation: {list(alloc.assignment)}")
    for machine, bundle in enumerate(alloc.bundles(inst.n_machines)):
        if bundle:
            print(f"  machine {machine}: tasks {sorted(bundle)}")
    print(f"value:      {_fmt(value)}")
    if pay is not None:
        print(f"payments:   [{', '.join(_fmt(float(x)) for x in pay)}]")
    if opt is not None:
        print(f"OPT:        {_fmt(opt)}")
    if rat is not None:
        print(f"ratio:      {_fmt(rat)}")
    if note:
        print(note)
    return EXIT_OK


# -- decompose ------------------------------------------------------------------

def cmd_decompose(args) -> int:
    inst, _ = load_instance(args.instance)
    if isinstance(inst, StarInstance):
        inst = star_as_graph(inst)
    if not isinstance(inst, GraphInstance):
        raise InapplicableError(f"decompose needs a graph, got a {type(inst).__name__}")
    rep = decompose(inst, args.method)
    if args.json:
        print(json.dumps({
            "orientation_number": rep.orientation_number,
            "degeneracy": rep.degeneracy,
            "method": rep.method,
            "contention": rep.contention,
            "bounds": rep.bounds,
            "decomposition": rep.decomposition.to_dict(),
        }, indent=2))
        return EXIT_OK
    print(f"graph:        {_describe(inst)}")
    print(f"o(G):         {rep.orientation_number}")
    print(f"degeneracy k: {rep.degeneracy}")
    print(f"chosen:       {rep.method} ({len(rep.decomposition.stars)} stars)")
    for star in rep.decomposition.stars:
        print(f"  root {star.root}: edges {list(star.edges)} leaves {list(star.leaves)}")
    print(f"c(T):         {rep.contention}")
    b = rep.bounds
    print(f"ratio bounds: 2c(T)={b['2c']}  2o(G)+2={b['2o+2']}  2k+2={b['2k+2']}")
    return EXIT_OK


# -- verify ---------------------------------------------------------------------

def cmd_verify(args) -> int:
    from gbmech.verify import battery_passed, run_battery

    mech = get_mechanism(args.mechanism, p=args.p, decomposition=args.decomposition)
    reports = run_battery(mech, args.scope, seed=args.seed, trials=args.trials)
    for rep in reports:
        if args.json:
            print(rep.to_json())
            continue
        if rep.property == "locality":
            verdict = rep.info.get("verdict", "local")
            print(f"INFO locality [{rep.mechanism}] {verdict}")
            if rep.counterexample is not None and args.transcripts:
                print(json.dumps(rep.counterexample, indent=2))
            continue
        print(rep.line())
        if not rep.passed:
            print(json.dumps(rep.counterexample, indent=2))
    return EXIT_OK if battery_passed(reports) else EXIT_VERIFY


# -- benchmark ----------------------------------------------------------------------

def _sizes(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        if ":" in part or ".." in part:
            lo, hi = part.replace("..", ":").split(":")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _size_key(family: str) -> str:
    if family in ("tree", "max", "max-deviation", "lp-small"):
        return "k"
    if family in ("random-tree", "random-graph", "random-multigraph", "random-degenerate"):
        return "n"
    return "m"


def _bench_row(job) -> dict:
    inst_id, family, inst, mech_name, p, decomposition, objective_kind, timing = job
    mech = get_mechanism(mech_name, p=p, decomposition=decomposition)
    if objective_kind is None:
        obj = mech.objective
    else:
        obj = _objective(argparse.Namespace(objective=objective_kind, p=p), mech)
    row = {
        "instance_id": inst_id, "family": family, "m": inst.n_tasks, "n": inst.n_machines,
        "k": inst.k if isinstance(inst, HyperstarInstance) else None,
        "p": obj.p, "mechanism": mech.label, "alg_value": None, "opt_value": None,
        "ratio": None, "runtime_ms": None, "flag": "",
    }
    if not mech.applicable(inst):
        row["flag"] = "inapplicable"
        return row
    try:
        start = time.perf_counter()
        alloc = mech.allocate(inst)
        elapsed = (time.perf_counter() - start) * 1000
    except CapacityError:
        row["flag"] = "capacity"
        return row
    row["alg_value"] = objective_value(inst, alloc, obj)
    if timing:
        row["runtime_ms"] = round(elapsed, 3)
    try:
        _, opt = optimal_allocation(inst, obj)
    except CapacityError:
        row["flag"] = "capacity"
        return row
    row["opt_value"] = opt
    try:
        row["ratio"] = ratio(row["alg_value"], opt, obj)
    except DegenerateInstanceError:
        row["flag"] = "degenerate"
    return row


def benchmark_rows(family: str, sizes: Sequence[int], mechanisms: Sequence[str], seed: int = 0,
                   count: int = 1, p: float | None = None, objective: str | None = None,
                   decomposition: str = "degeneracy", params: dict | None = None,
                   timing: bool = True, jobs: int = 1) -> list[dict]:
    """One row per (instance, mechanism), ordered by instance id then mechanism."""
    params = dict(params or {})
    key = _size_key(family)
    work = []
    for size in sizes:
        for rep in range(count):
            inst_seed = seed + 1000 * size + rep
            inst = generate(family, inst_seed, **{**params, key: size})
            inst_id = f"{family}-{key}{size:03d}-{rep:04d}"
            for name in mechanisms:
                work.append((inst_id, family, inst, name, p, decomposition, objective, timing))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_bench_row, work, chunksize=8))
    else:
        rows = [_bench_row(w) for w in work]
    rows.sort(key=lambda r: (r["instance_id"], r["mechanism"]))
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _params(pairs: Sequence[str]) -> dict:
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise StructuralError(f"parameter {pair!r} is not key=value")
        k, v = pair.split("=", 1)
        out[k] = float(v) if any(c in v for c in ".eE") or v in ("inf",) else int(v)
    return out


def cmd_benchmark(args) -> int:
    mechanisms = [m.strip() for m in args.mechanisms.split(",") if m.strip()]
    for name in mechanisms:
        get_mechanism(name, p=args.p, decomposition=args.decomposition)  # fail fast on bad names
    rows = benchmark_rows(args.family, _sizes(args.sizes), mechanisms, seed=args.seed, count=args.count,
                          p=args.p, objective=args.objective, decomposition=args.decomposition,
                          params=_params(args.param), timing=not args.no_timing, jobs=args.jobs)
    text = rows_to_csv(rows)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {len(rows)} rows to {args.output}", file=sys.stderr)
    if any(r["flag"] == "inapplicable" for r in rows):
        return EXIT_INAPPLICABLE
    return EXIT_OK


# -- gen ------------------------------------------------------------------------------

def cmd_gen(args) -> int:
    params = _params(args.param)
    inst = generate(args.family, args.seed, **params)
    if args.output in (None, "-"):
        dump_instance(inst, sys.stdout)
        sys.stdout.write("\n")
    else:
        dump_instance(inst, args.output)
    if args.replay:
        out = sys.stderr if args.output in (None, "-") else sys.stdout
        if args.family in ("max", "max-deviation"):
            rep = replay_max_lb(float(params.get("eps", 1e-6)))
            print(f"OPT primary {_fmt(rep.opt_primary)}, all to root {_fmt(rep.all_to_root)}, "
                  f"ratio {_fmt(rep.ratios[0])}", file=out)
            print(f"OPT deviation {_fmt(rep.opt_deviation)}, root keeps task 0 {_fmt(rep.kept_on_deviation)}, "
                  f"ratio {_fmt(rep.ratios[1])}", file=out)
        elif args.family == "lp-small":
            rep = replay_lp_small_lb(float(params.get("a", 1.618033988749895)), float(params.get("p", 0.5)))
            print(f"OPT {_fmt(rep.opt)}, best other {_fmt(rep.best_other)}; deviation OPT "
                  f"{_fmt(rep.deviation_opt)}, kept {_fmt(rep.deviation_kept)}; bound {_fmt(rep.bound)}",
                  file=out)
        else:
            mech = get_mechanism(args.mechanism)
            alloc = mech.allocate(inst)
            value = objective_value(inst, alloc, mech.objective)
            opt = optimal_allocation(inst, mech.objective)[1]
            print(f"{mech.label}: value {_fmt(value)}, OPT {_fmt(opt)}, ratio "
                  f"{_fmt(ratio(value, opt, mech.objective))}", file=out)
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------------

def _mech_options(p: argparse.ArgumentParser, mech_default: str | None = "hybrid-max") -> None:
    if mech_default is not None:
        p.add_argument("-m", "--mechanism", default=mech_default,
                       help=f"one of {', '.join(SHIPPED)} (default {mech_default})")
    p.add_argument("--p", type=float, default=None, help="norm exponent for the L^p variants")
    p.add_argument("--decomposition", default="degeneracy", choices=("degeneracy", "orientation", "best"),
                   help="star-cover decomposition source")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbmech", description="Truthful scheduling mechanisms on stars and graphs.")
    parser.add_argument("--version", action="version", version=f"gbmech {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a mechanism on an instance file")
    p.add_argument("instance")
    _mech_options(p)
    p.add_argument("--objective", choices=("makespan", "lp_min", "lp_max", "sum_min"), default=None)
    p.add_argument("--json", action="store_true", help="emit a JSON report including the allocation")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decompose", help="star decomposition of a graph file")
    p.add_argument("instance")
    p.add_argument("--method", default="best", choices=("best", "orientation", "degeneracy"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="truthfulness battery for a named mechanism")
    p.add_argument("mechanism", help=f"one of {', '.join(SHIPPED)}, or anti-monotone")
    _mech_options(p, None)
    p.add_argument("--scope", default="exhaustive", choices=("exhaustive", "random", "all"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10000, help="pairwise trials for the random scope")
    p.add_argument("--transcripts", action="store_true", help="also print the locality witness")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("benchmark", help="approximation ratios against the oracle, as CSV")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--sizes", default="2:6", help="e.g. 2:10 or 3,5,7")
    p.add_argument("--count", type=int, default=1, help="instances per size")
    p.add_argument("--mechanisms", default="hybrid-max", help="comma separated names")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--objective", choices=("makespan", "lp_min", "lp_max", "sum_min"), default=None)
    p.add_argument("--decomposition", default="degeneracy", choices=("degeneracy", "orientation", "best"))
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="extra generator parameter (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="leave runtime_ms empty so output is reproducible")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("gen", help="write a generated instance to a file")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--replay", action="store_true", help="print the ratio arithmetic for the instance")
    p.add_argument("-m", "--mechanism", default="hybrid-max", help="mechanism used by --replay")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InapplicableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except (StructuralError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
