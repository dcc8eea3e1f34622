"""Command-line front end: solve, check, gen, and bench subcommands.

Exit codes: 0 success, 1 failed check or violated bound, 2 usage or parse
error, 3 refused because an instance exceeds a brute-force budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .adaptivegreedy import scenario_adaptive_greedy
from .core import (
    PreconditionError,
    ScencoverError,
    expected_cost,
    tree_size,
    validate_tree,
)
from .generate import random_instance
from .mixedgreedy import (
    materialize,
    mixed_greedy,
    ratio_ceiling,
    scenario_mixed_greedy_tree,
)
from .oracle import OracleBudgetError, optimal_tree
from .serialize import (
    ParseError,
    dumps_document,
    emit_document,
    load_instance,
    save_instance,
    tree_to_document,
)
from .utility import (
    check_adaptive_submodular,
    check_monotone,
    check_submodular,
    min_progress_ratio,
)

#: Explicit trees larger than this are emitted as per-row traces instead.
MAX_TREE_NODES = 100_000

#: Soft cap on (states+1)^n for the exhaustive property checkers.
MAX_CHECK_SPACE = 300_000

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_REFUSED = 3

ALGORITHMS = ("mixed", "scenario-mixed", "scenario-adaptive", "optimal")
PROPERTIES = ("monotone", "submodular", "adaptive-submodular", "rho", "goal")
FAMILIES = ("coverage", "k_of_n", "or", "g_S", "g_W")


def _fraction_fields(value: Fraction) -> dict:
    return {"exact": str(value), "decimal": float(value)}


def _solve_tree(instance, algorithm):
    """Returns (tree, traces or None).  May raise OracleBudgetError."""
    if algorithm == "mixed":
        traces: list = []
        return mixed_greedy(instance, traces=traces), traces
    if algorithm == "scenario-mixed":
        traces = []
        return scenario_mixed_greedy_tree(instance, traces=traces), traces
    if algorithm == "scenario-adaptive":
        strategy = scenario_adaptive_greedy(instance)
        return materialize(strategy, instance.alphabet, instance.n), None
    if algorithm == "optimal":
        tree, _ = optimal_tree(instance)
        return tree, None
    raise PreconditionError("unknown algorithm %r" % algorithm)


def _strategy_document(tree, instance):
    if tree_size(tree) <= MAX_TREE_NODES:
        return {"tree": tree_to_document(tree)}
    from .core import follow

    rows = []
    for a, w in instance.sample.rows:
        cost, terminal = follow(tree, a, instance.costs)
        items = [i + 1 for i, s in enumerate(terminal) if s != "*"]
        rows.append({
            "assignment": list(a),
            "weight": w,
            "cost": str(cost),
            "items": items,
        })
    return {"trace": rows}


def cmd_solve(args) -> int:
    instance, _ = load_instance(args.infile)
    try:
        tree, traces = _solve_tree(instance, args.algorithm)
    except OracleBudgetError as exc:
        print("refused: %s" % exc, file=sys.stderr)
        return EXIT_REFUSED

    cost = expected_cost(tree, instance)
    report = {
        "algorithm": args.algorithm,
        "expected_cost": _fraction_fields(cost),
        "goal": instance.goal,
        "validation": validate_tree(tree, instance).status,
        "strategy": _strategy_document(tree, instance),
    }
    try:
        progress = min_progress_ratio(instance.utility)
        rho = progress.ratio
        eta = progress.floor
        report["rho"] = str(rho)
        report["eta"] = str(eta)
        ceiling = ratio_ceiling(eta, instance.goal)
        report["ratio_ceiling"] = None if ceiling is None else str(ceiling)
    except PreconditionError:
        report["rho"] = report["eta"] = report["ratio_ceiling"] = None
    if traces:
        report["root_budget"] = str(traces[0].budget)
    with open(args.outfile, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print("%s: expected cost %s (%s)"
          % (args.algorithm, cost, float(cost)))
    return EXIT_OK


def _check_space(instance) -> bool:
    return (len(instance.alphabet) + 1) ** instance.n <= MAX_CHECK_SPACE


def cmd_check(args) -> int:
    instance, _ = load_instance(args.infile)
    g = instance.utility
    prop = args.property
    if prop != "goal" and not _check_space(instance):
        print("refused: state space too large for exhaustive checking",
              file=sys.stderr)
        return EXIT_REFUSED

    if prop == "rho":
        try:
            progress = min_progress_ratio(g)
        except PreconditionError as exc:
            print("rho undefined: %s" % exc, file=sys.stderr)
            return EXIT_FAILED
        print("rho = %s (eta = %s)" % (progress.ratio, progress.floor))
        return EXIT_OK
    if prop == "goal":
        ok = g.verify_goal_on_full()
        print("goal: %s" % ("reached on all realizations" if ok else "FAILED"))
        return EXIT_OK if ok else EXIT_FAILED

    if prop == "monotone":
        result = check_monotone(g)
    elif prop == "submodular":
        result = check_submodular(g)
    else:
        result = check_adaptive_submodular(g, instance.sample)
    if result.ok:
        print("%s: true" % prop)
        return EXIT_OK
    print("%s: false, witness %r" % (prop, result.witness))
    return EXIT_FAILED


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    try:
        instance, descriptor = random_instance(
            rng,
            n=args.n,
            num_states=args.states,
            sample_size=args.sample_size,
            family=args.family,
            universe_size=args.universe_size,
        )
    except ScencoverError as exc:
        print("generation failed: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    if _check_space(instance):
        if not (check_monotone(instance.utility).ok
                and check_submodular(instance.utility).ok
                and instance.utility.verify_goal_on_full()):
            print("generated instance failed post-validation", file=sys.stderr)
            return EXIT_FAILED
    save_instance(args.outfile, instance, descriptor)
    print("wrote %s (n=%d, family=%s, seed=%d)"
          % (args.outfile, args.n, args.family, args.seed))
    return EXIT_OK


def _bench_row(path, algorithms):
    instance, _ = load_instance(path)
    row = {"file": str(path), "n": instance.n, "goal": instance.goal}
    try:
        _, optimum = optimal_tree(instance)
        row["optimal"] = str(optimum)
    except OracleBudgetError:
        optimum = None
        row["optimal"] = "oracle skipped"

    try:
        eta = min_progress_ratio(instance.utility).floor
    except PreconditionError:
        eta = None
    ceiling = None if eta is None else ratio_ceiling(eta, instance.goal)
    row["ratio_ceiling"] = None if ceiling is None else str(ceiling)

    all_pass = True
    for algorithm in algorithms:
        tree, _ = _solve_tree(instance, algorithm)
        cost = expected_cost(tree, instance)
        entry = {"cost": str(cost)}
        if optimum is None:
            entry["ratio"] = None
            entry["pass"] = None
        else:
            ratio = cost / optimum if optimum > 0 else None
            entry["ratio"] = None if ratio is None else str(ratio)
            ok = cost >= optimum
            if algorithm == "mixed" and ceiling is not None and ratio is not None:
                ok = ok and ratio <= ceiling
            entry["pass"] = ok
            all_pass = all_pass and ok
        row[algorithm] = entry
    return row, all_pass


def cmd_bench(args) -> int:
    import pathlib

    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algorithms:
        if a not in ALGORITHMS or a == "optimal":
            print("unknown bench algorithm %r" % a, file=sys.stderr)
            return EXIT_USAGE
    paths = sorted(pathlib.Path(args.directory).glob("*.json"))
    rows = []
    ok = True
    for path in paths:
        row, row_ok = _bench_row(path, algorithms)
        rows.append(row)
        ok = ok and row_ok
        cells = ["%s=%s" % (a, row[a]["cost"]) for a in algorithms]
        print("%s: C*=%s %s" % (path.name, row["optimal"], " ".join(cells)))
    table = {"algorithms": algorithms, "rows": rows}
    with open(args.outfile, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(table, indent=2, sort_keys=True) + "\n")
    print("%d instance(s), bounds %s" % (len(rows), "ok" if ok else "VIOLATED"))
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scencover",
        description="Decision-tree solvers for goal-driven adaptive testing "
                    "over weighted scenario samples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a solver on an instance file")
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="verify a structural property")
    p.add_argument("--property", required=True, choices=PROPERTIES)
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--states", type=int, default=2)
    p.add_argument("--sample-size", type=int, default=4)
    p.add_argument("--universe-size", type=int, default=4)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="compare solvers against the oracle")
    p.add_argument("--dir", dest="directory", required=True)
    p.add_argument("--algorithms", required=True,
                   help="comma-separated subset of the non-oracle solvers")
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print("file not found: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except OracleBudgetError as exc:
        print("refused: %s" % exc, file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
