"""Command-line front end.

Exit codes: 0 success, 1 bad input (parse errors, size guards), 2 the
feasibility graph is disconnected. Data goes to stdout or ``--out``;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import warnings
from typing import List, Optional

import numpy as np

from . import fileio
from .graph import build_graph, components
from .minimizer import DisconnectedError, build_cover_instance, minimize_interference
from .model import ModelError
from .oracle import (
    DEFAULT_LIMIT,
    TooLargeError,
    brute_force_opt,
    gen_exponential_chain,
    gen_random_geometric,
    gen_uniform_gain,
    nearest_neighbor_baseline,
)
from .wmpmpsc import RoundingParams, rounding_probabilities, sample_rounding, solve_lp

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DISCONNECTED = 2

COMPARE_COLUMNS = ("n", "opt", "alg_I", "baseline_I", "ratio", "iterations")
STATS_COLUMNS = ("trial", "seed", "accepted", "covered", "sets_chosen", "max_weight", "bound", "z_prime")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    if args.kind == "expchain":
        inst = gen_exponential_chain(args.n, beta_acc=args.beta)
    elif args.kind == "geometric":
        inst = gen_random_geometric(
            args.n, args.seed, side=args.side, alpha=args.alpha, beta_acc=args.beta, xi_max=args.xi_max, model=args.model
        )
    else:
        inst = gen_uniform_gain(args.n, beta_acc=args.beta, xi_max=args.xi_max or args.beta)
    _emit(fileio.dumps(fileio.instance_to_dict(inst)), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = fileio.read_instance(args.instance)
    sol = minimize_interference(inst)
    _emit(fileio.dumps(fileio.solution_to_dict(sol)), args.out)
    if args.log_csv:
        with open(args.log_csv, "w") as fh:
            fh.write(fileio.logs_csv(sol.logs))
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = fileio.read_instance(args.instance)
    res = brute_force_opt(inst, limit=args.limit)
    doc = {
        "opt": res.opt if res.feasible else None,
        "best_edges": [list(e) for e in res.best_edges],
        "explored": res.explored,
    }
    _emit(fileio.dumps(doc), args.out)
    if not res.feasible:
        print("no connected edge subset exists", file=sys.stderr)
        return EXIT_DISCONNECTED
    return EXIT_OK


def cmd_baseline(args) -> int:
    inst = fileio.read_instance(args.instance)
    sol = nearest_neighbor_baseline(inst)
    _emit(fileio.dumps(fileio.solution_to_dict(sol)), args.out)
    return EXIT_OK


def compare_row(inst, limit: int = DEFAULT_LIMIT) -> List[str]:
    alg = minimize_interference(inst)
    base = nearest_neighbor_baseline(inst)
    try:
        opt = brute_force_opt(inst, limit=limit).opt
    except TooLargeError:
        opt = math.nan
    if opt > 0:
        ratio = alg.report.max / opt
    elif opt == 0:
        ratio = 1.0
    else:
        ratio = math.nan
    return [fileio.fmt(v) for v in (inst.n, float(opt), alg.report.max, base.report.max, float(ratio), alg.iterations)]


def cmd_compare(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(COMPARE_COLUMNS)
    for path in args.instances:
        w.writerow(compare_row(fileio.read_instance(path), args.limit))
    return EXIT_OK


def first_cover_instance(inst):
    """The weighted cover instance the minimiser solves in its first round."""
    n = inst.n
    graph = build_graph(inst)
    full = components(n, graph.edges)
    if full.count > 1:
        raise DisconnectedError(full.groups())
    if n < 2:
        raise ValueError("rounding statistics need at least two nodes")
    return build_cover_instance(inst, graph, components(n, ())).wmpmpsc


def rounding_stats(cov, trials: int, seed: int) -> List[List[str]]:
    """Seeded randomized-rounding trials; one row per trial, then a summary row
    whose ``accepted``/``covered`` columns hold rates and whose
    ``sets_chosen``/``max_weight`` columns hold means."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x, z = solve_lp(cov)
    params = RoundingParams.from_instance(cov, z)
    p = rounding_probabilities(x, params)
    rows = []
    accepted = covered = 0
    weights = []
    sizes = []
    for k in range(trials):
        chosen = sample_rounding(p, np.random.default_rng(seed + k))
        ok_cover = not cov.uncovered(chosen)
        mw = cov.max_weight(chosen)
        ok = ok_cover and mw <= params.bound + 1e-9
        accepted += ok
        covered += ok_cover
        weights.append(mw)
        sizes.append(len(chosen))
        rows.append([fileio.fmt(v) for v in (k, seed + k, int(ok), int(ok_cover), len(chosen), mw, params.bound, z)])
    summary = (
        "summary",
        seed,
        accepted / trials,
        covered / trials,
        float(np.mean(sizes)),
        float(np.mean(weights)),
        params.bound,
        z,
    )
    rows.append([fileio.fmt(v) for v in summary])
    return rows


def cmd_rounding_stats(args) -> int:
    inst = fileio.read_instance(args.instance)
    rows = rounding_stats(first_cover_instance(inst), args.trials, args.seed)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(STATS_COLUMNS)
    w.writerows(rows)
    print(f"acceptance rate {rows[-1][2]} over {args.trials} trials", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="interfmin", description="Low-interference connected power assignment.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated instance file")
    p.add_argument("kind", choices=["expchain", "geometric", "gain"])
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", type=float, default=10.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--xi-max", type=float, default=None)
    p.add_argument("--model", choices=["pathloss", "unitdisk"], default="pathloss")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the minimiser on an instance")
    p.add_argument("instance")
    p.add_argument("--out")
    p.add_argument("--log-csv")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact optimum by enumeration (small instances)")
    p.add_argument("instance")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("baseline", help="nearest-neighbour topology")
    p.add_argument("instance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("compare", help="one CSV row per instance: optimum, algorithm, baseline")
    p.add_argument("instances", nargs="+")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("rounding-stats", help="seeded randomized-rounding trials on the first iteration")
    p.add_argument("instance")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rounding_stats)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return args.func(args)
    except DisconnectedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except (fileio.FormatError, ModelError, TooLargeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
