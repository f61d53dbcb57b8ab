"""Command-line front end.

Results go to stdout as CSV; summaries and errors go to stderr.  Errors are
reported as a JSON list on stderr with a nonzero exit status.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from . import formats
from .bench import (
    METHODS,
    BenchConfig,
    bench_csv,
    generate_instance,
    generate_knapsack,
    generate_set_cover,
    run_bench,
    solve,
)
from .errors import QuestoptError
from .genetic import GaParams, evolve, generation_log_csv
from .local_search import LsConfig, local_search, trace_csv
from .model import ProblemTable, validate_table
from .oracles import brute_min_cover, exact_owbq, exact_ldq, knapsack_dp
from .reductions import (
    KnapsackInstance,
    SetCoverInstance,
    extract_cover,
    knapsack_packing,
    ldq_evolve,
    ldq_local_search,
    reduce_knapsack,
    reduce_set_cover,
)
from .rqsf import QPF, CompositeSelector, build_questionnaire


class UsageError(QuestoptError):
    """Flag combination the parser cannot reject on its own."""


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="RNG seed (required for ga)")
    p.add_argument("--char-fn", default=None, choices=("entropy", "compactness", "cost_entropy"))
    p.add_argument("--max-iterations", type=int, default=1000)
    p.add_argument("--dumb-count", type=int, default=None)
    p.add_argument("--population-size", type=int, default=GaParams.population_size)
    p.add_argument("--mating-rate", type=float, default=GaParams.mating_rate)
    p.add_argument("--mutation-rate", type=float, default=GaParams.mutation_rate)
    p.add_argument("--genotype-length", type=int, default=None)
    p.add_argument("--generations-without-improvement", type=int,
                   default=GaParams.generations_without_improvement)
    p.add_argument("--max-generations", type=int, default=GaParams.max_generations)


def _ga_params(args, char_fn: str, family: str = "mixed") -> GaParams:
    return GaParams(
        population_size=args.population_size,
        mating_rate=args.mating_rate,
        mutation_rate=args.mutation_rate,
        genotype_length=args.genotype_length,
        generations_without_improvement=args.generations_without_improvement,
        max_generations=args.max_generations,
        rqsf_set=family,
        char_fn=char_fn,
        seed=args.seed if args.seed is not None else 0,
        dumb_count=args.dumb_count,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="questopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--kind", choices=("owbq", "msc", "ks"), default="owbq")
    g.add_argument("--n", type=int, required=True, help="events / universe size / items")
    g.add_argument("--k", type=int, default=None, help="questions (owbq) or subsets (msc)")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--cost-min", type=float, default=1.0)
    g.add_argument("--cost-max", type=float, default=10.0)
    g.add_argument("--prob-mode", choices=("uniform", "random"), default="uniform")
    g.add_argument("--weighted", action="store_true", help="weighted set cover / valued knapsack")

    v = sub.add_parser("validate", help="check logical completeness of an OWBQ instance")
    v.add_argument("file")

    s = sub.add_parser("solve", help="build a questionnaire for an OWBQ instance")
    s.add_argument("file")
    s.add_argument("--method", choices=METHODS, required=True)
    s.add_argument("--trace", help="write the LS trace or GA generation log as CSV here")
    _add_search_flags(s)

    r = sub.add_parser("reduce", help="solve set cover or knapsack through questionnaires")
    r.add_argument("problem", choices=("set-cover", "knapsack"))
    r.add_argument("file")
    r.add_argument("--method", choices=("qpf", "ls-greedy", "ls-dumb", "ls-mixed", "ga", "exact"),
                   default=None, help="omit to print the reduced OWBQ table")
    _add_search_flags(r)

    b = sub.add_parser("bench", help="compare all methods, one CSV row per instance")
    b.add_argument("files", nargs="*")
    b.add_argument("--generate", type=int, default=0, help="also generate this many instances")
    b.add_argument("--n-range", type=int, nargs=2, default=(6, 10))
    b.add_argument("--k-range", type=int, nargs=2, default=(4, 8))
    b.add_argument("--exact-cap", type=int, default=12)
    _add_search_flags(b)
    return parser


def _need_seed(args, method: str) -> None:
    if method == "ga" and args.seed is None:
        raise UsageError("--seed is required for stochastic methods")


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def cmd_gen(args, out) -> None:
    if args.kind == "owbq":
        if args.k is None:
            raise UsageError("--k is required for owbq instances")
        obj = generate_instance(args.n, args.k, args.seed, (args.cost_min, args.cost_max), args.prob_mode)
    elif args.kind == "msc":
        obj = generate_set_cover(args.n, args.k or args.n, args.seed, args.weighted)
    else:
        obj = generate_knapsack(args.n, args.seed, args.weighted)
    out.write(formats.dumps(obj))


def cmd_validate(args, out) -> None:
    t = formats.read_instance(args.file)
    if not isinstance(t, ProblemTable):
        raise QuestoptError("validate expects an OWBQ instance")
    rep = validate_table(t)
    w = _writer(out)
    w.writerow(["complete", "witness"])
    w.writerow([str(rep.complete).lower(), "" if rep.witness is None else f"{rep.witness[0]} {rep.witness[1]}"])


def cmd_solve(args, out) -> None:
    _need_seed(args, args.method)
    t = formats.read_instance(args.file)
    if not isinstance(t, ProblemTable):
        raise QuestoptError("solve expects an OWBQ instance")
    char_fn = args.char_fn or "entropy"
    start = time.perf_counter()
    if args.method.startswith("ls-"):
        res = local_search(t, LsConfig(args.method[3:], char_fn, args.max_iterations, args.dumb_count))
        cost, log = res.cost, trace_csv(res.trace)
    elif args.method == "ga":
        res = evolve(t, _ga_params(args, char_fn))
        cost, log = res.cost, generation_log_csv(res.log)
    else:
        _, cost = solve(t, args.method)
        log = None
    elapsed = (time.perf_counter() - start) * 1000.0
    if args.trace and log is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(log)
    w = _writer(out)
    w.writerow(["method", "cost", "time_ms"])
    w.writerow([args.method, repr(cost), f"{elapsed:.3f}"])
    print(f"{args.method}: cost {cost:.6f} in {elapsed:.1f} ms", file=sys.stderr)


def _solve_table(t: ProblemTable, method: str, args, char_fn: str):
    if method == "qpf":
        return build_questionnaire(CompositeSelector.constant(QPF, char_fn), t)
    if method.startswith("ls-"):
        return local_search(t, LsConfig(method[3:], char_fn, args.max_iterations, args.dumb_count)).questionnaire
    if method == "ga":
        return evolve(t, _ga_params(args, char_fn)).questionnaire
    return exact_owbq(t).witness


def cmd_reduce(args, out) -> None:
    inst = formats.read_instance(args.file)
    w = _writer(out)
    if args.problem == "set-cover":
        if not isinstance(inst, SetCoverInstance):
            raise QuestoptError("expected an MSC instance")
        table, mapping = reduce_set_cover(inst)
        if args.method is None:
            out.write(formats.dumps_table(table))
            print(f"epsilon = {mapping.epsilon!r}", file=sys.stderr)
            return
        _need_seed(args, args.method)
        q = _solve_table(table, args.method, args, args.char_fn or "compactness")
        cover = sorted(extract_cover(q, mapping))
        w.writerow(["method", "cover_size", "cover_weight", "subsets"])
        w.writerow([args.method, len(cover), repr(inst.weight_of(cover)), " ".join(map(str, cover))])
        if inst.m <= 20:
            print(f"brute-force optimum: {brute_min_cover(inst).value}", file=sys.stderr)
        return
    if not isinstance(inst, KnapsackInstance):
        raise QuestoptError("expected a KS instance")
    ldq = reduce_knapsack(inst)
    if args.method is None:
        out.write(formats.dumps_table(ldq.table))
        print(f"budget = {ldq.budget!r}", file=sys.stderr)
        return
    _need_seed(args, args.method)
    char_fn = args.char_fn or "entropy"
    if args.method == "exact":
        res = exact_ldq(ldq)
        tree, d = res.tree, res.value
    elif args.method == "ga":
        tree, _, d = ldq_evolve(ldq, _ga_params(args, char_fn))
    else:
        family = "greedy" if args.method == "qpf" else args.method[3:]
        iters = 1 if args.method == "qpf" else args.max_iterations
        functions = (QPF,) if args.method == "qpf" else family
        tree, _, d = ldq_local_search(ldq, LsConfig(functions, char_fn, iters, args.dumb_count))
    items = sorted(knapsack_packing(tree, ldq, inst))
    w.writerow(["method", "degree", "items_packed", "weight", "items"])
    w.writerow([args.method, repr(d), len(items), repr(sum(inst.item_weights[i] for i in items)),
                " ".join(map(str, items))])
    print(f"dp optimum count: {knapsack_dp(inst).value:g}", file=sys.stderr)


def cmd_bench(args, out) -> None:
    import numpy as np

    instances = []
    for path in args.files:
        t = formats.read_instance(path)
        if not isinstance(t, ProblemTable):
            raise QuestoptError(f"{path}: bench expects OWBQ instances")
        instances.append((path, t))
    if args.generate:
        if args.seed is None:
            raise UsageError("--seed is required to generate instances")
        rng = np.random.default_rng(args.seed)
        for i in range(args.generate):
            while True:
                n = int(rng.integers(args.n_range[0], args.n_range[1] + 1))
                k = int(rng.integers(args.k_range[0], args.k_range[1] + 1))
                if 2**k >= n:
                    break
            instances.append((f"gen{i}", generate_instance(n, k, int(rng.integers(2**31)))))
    if not instances:
        raise UsageError("no instances given")
    config = BenchConfig(
        seed=args.seed or 0,
        exact_cap=args.exact_cap,
        max_iterations=args.max_iterations,
        ga=_ga_params(args, args.char_fn or "entropy"),
    )
    rows = run_bench(instances, config)
    out.write(bench_csv(rows))
    failures = [{"test": r.test, "error": e} for r in rows for e in r.errors]
    if failures:
        print(json.dumps(failures), file=sys.stderr)
        raise _Failed()


class _Failed(Exception):
    pass


COMMANDS = {"gen": cmd_gen, "validate": cmd_validate, "solve": cmd_solve,
            "reduce": cmd_reduce, "bench": cmd_bench}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args, out)
    except _Failed:
        return 1
    except (QuestoptError, OSError, ValueError) as exc:
        print(json.dumps([{"error": type(exc).__name__, "message": str(exc)}]), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
