"""Command-line front end: solve, benchmark, bound lab, oracle, weights.

Exit codes: 0 when the instance is solved (Optimal or Trivial), 2 when
it is proven Infeasible, 3 on TimeLimit, 1 for usage or IO problems.
Timing lives in its own JSON sub-object so reports can be compared
byte-for-byte with timing stripped.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

from .graph import DimacsError, Graph, read_dimacs
from .instance import Instance, format_weights, parse_weights, random_costs
from .lab import bound_report
from .master import FAMILY_MODES
from .oracle import (
    BudgetExceeded,
    CostBounded,
    Full,
    Infeasible,
    OracleResult,
    brute_force,
)
from .engine import (
    INFEASIBLE_STATUS,
    OPTIMAL,
    TIME_LIMIT,
    SolveOptions,
    SolveReport,
    solve,
)

EXIT_SOLVED = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_TIME_LIMIT = 3


class CliError(Exception):
    """Usage or IO failure; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract wants 1
    def error(self, message: str):
        raise CliError(message)


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    p.add_argument("--heuristic", choices=("on", "off"), default="on")
    p.add_argument("--symmetry", choices=("on", "off"), default="on")
    p.add_argument(
        "--symmetry-orbit-branching", action="store_true",
        help="branch on a whole vertex orbit at the root",
    )
    p.add_argument("--clique-family", choices=FAMILY_MODES, default="cover")
    p.add_argument("--equality-rows", action="store_true")
    p.add_argument(
        "--connectivity-cut", choices=("auto", "on", "off"), default="auto"
    )
    p.add_argument("--separate-root", action="store_true")
    p.add_argument("--pricing-early-exit", action="store_true")
    p.add_argument("--pricing-max-cols", type=int, default=10, metavar="N")
    p.add_argument("--seed", type=int, default=0)


def _weights_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--weights", default="unit", metavar="unit|file:<path>|random:<seed>"
    )


def _options_from(args: argparse.Namespace) -> SolveOptions:
    return SolveOptions(
        time_limit=args.time_limit,
        heuristic=args.heuristic == "on",
        symmetry=args.symmetry == "on",
        orbit_branching=args.symmetry_orbit_branching,
        clique_family=args.clique_family,
        equality_rows=args.equality_rows,
        connectivity_cut=args.connectivity_cut,
        separate_root=args.separate_root,
        pricing_early_exit=args.pricing_early_exit,
        pricing_max_columns=args.pricing_max_cols,
        seed=args.seed,
    )


def _load_graph(path: str, weights: str) -> Graph:
    try:
        parsed = read_dimacs(path)
    except (OSError, DimacsError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    for warning in parsed.warnings():
        print(f"warning: {path}: {warning}", file=sys.stderr)
    g = parsed.graph
    if weights == "unit":
        return g
    if weights.startswith("file:"):
        wpath = weights[len("file:"):]
        try:
            costs = parse_weights(Path(wpath).read_text(), g.n)
        except (OSError, ValueError) as exc:
            raise CliError(f"{wpath}: {exc}") from exc
        return g.with_costs(costs)
    if weights.startswith("random:"):
        try:
            seed = int(weights[len("random:"):])
        except ValueError as exc:
            raise CliError(f"bad --weights value {weights!r}") from exc
        return g.with_costs(random_costs(g.n, seed))
    raise CliError(f"bad --weights value {weights!r}")


def _round(value: Optional[float], digits: int = 9) -> Optional[float]:
    # stable text form for the determinism guarantee
    if value is None:
        return None
    if math.isinf(value):
        return value
    return round(value + 0.0, digits)


def report_json(rep: SolveReport) -> str:
    doc = {
        "instance": rep.instance,
        "n": rep.n,
        "m": rep.m,
        "k": rep.k,
        "status": rep.status,
        "objective": _round(rep.objective),
        "cut": None if rep.cut is None else [v + 1 for v in rep.cut],
        "num_components": rep.num_components,
        "root_lp_bound": _round(rep.root_lp_bound),
        "best_bound": _round(rep.best_bound),
        "gap_percent": _round(rep.gap_percent),
        "nodes": rep.nodes,
        "max_depth": rep.max_depth,
        "cols_total": rep.cols_total,
        "cols_root": rep.cols_root,
        "timing": {
            "pricing_seconds": rep.pricing_seconds,
            "total_seconds": rep.total_seconds,
        },
    }
    return json.dumps(doc, indent=2)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        try:
            Path(output).write_text(text + "\n")
        except OSError as exc:
            raise CliError(f"{output}: {exc}") from exc
    else:
        print(text)


def _status_exit(status: str) -> int:
    if status == OPTIMAL:  # covers trivial instances: empty cut, objective 0
        return EXIT_SOLVED
    if status == INFEASIBLE_STATUS:
        return EXIT_INFEASIBLE
    if status == TIME_LIMIT:
        return EXIT_TIME_LIMIT
    raise CliError(f"engine returned unknown status {status!r}")


def cmd_solve(args: argparse.Namespace) -> int:
    g = _load_graph(args.instance, args.weights)
    rep = solve(Instance(g, args.k), _options_from(args))
    _emit(report_json(rep), args.output)
    return _status_exit(rep.status)


BENCH_COLUMNS = (
    "instance", "n", "m", "k", "status", "objective", "root_bound", "gap%",
    "nodes", "depth", "cols_total", "cols_root", "time_total", "time_pricing",
)


def _bench_row(rep: SolveReport) -> list:
    def num(x):
        return "" if x is None else f"{x:.6g}"

    return [
        rep.instance, rep.n, rep.m, rep.k, rep.status, num(rep.objective),
        num(rep.root_lp_bound), num(rep.gap_percent), rep.nodes,
        rep.max_depth, rep.cols_total, rep.cols_root,
        f"{rep.total_seconds:.3f}", f"{rep.pricing_seconds:.3f}",
    ]


def _bench_one(path: str, k: int, weights: str, opts: SolveOptions):
    g = _load_graph(path, weights)
    return solve(Instance(g, k), opts)


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        ks = [int(part) for part in args.k.split(",") if part]
    except ValueError as exc:
        raise CliError(f"bad --k list {args.k!r}") from exc
    if not ks:
        raise CliError("--k needs at least one value")
    opts = _options_from(args)
    jobs = [(path, k) for k in ks for path in args.instances]
    threads = max(1, int(os.environ.get("KVCUT_THREADS", "1")))
    results: dict[tuple[str, int], SolveReport | str] = {}
    if threads == 1:
        for path, k in jobs:
            try:
                results[(path, k)] = _bench_one(path, k, args.weights, opts)
            except Exception as exc:  # noqa: BLE001 - batch survives
                results[(path, k)] = str(exc)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                pool.submit(_bench_one, path, k, args.weights, opts): (path, k)
                for path, k in jobs
            }
            for fut in concurrent.futures.as_completed(futures):
                key = futures[fut]
                try:
                    results[key] = fut.result()
                except Exception as exc:  # noqa: BLE001 - batch survives
                    results[key] = str(exc)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    failures = 0
    for k in ks:
        group = []
        for path in args.instances:
            res = results[(path, k)]
            if isinstance(res, SolveReport):
                writer.writerow(_bench_row(res))
                group.append(res)
            else:
                print(f"error: {path} k={k}: {res}", file=sys.stderr)
                writer.writerow([path, "", "", k, "Error"] + [""] * 9)
                failures += 1
        if group:
            # per-k average over the instances that produced numbers,
            # mirroring the usual benchmark-table grouping
            solved = [r for r in group if r.objective is not None]
            writer.writerow([
                f"avg(k={k})", "", "", k, f"{len(group)} runs",
                _avg([r.objective for r in solved]),
                _avg([r.root_lp_bound for r in group]),
                _avg([r.gap_percent for r in group]),
                _avg([r.nodes for r in group]),
                _avg([r.max_depth for r in group]),
                _avg([r.cols_total for r in group]),
                _avg([r.cols_root for r in group]),
                _avg([r.total_seconds for r in group]),
                _avg([r.pricing_seconds for r in group]),
            ])
    _emit(buf.getvalue().rstrip("\n"), args.output)
    return EXIT_USAGE if failures else EXIT_SOLVED


def _avg(values: list) -> str:
    vals = [v for v in values if v is not None]
    if not vals:
        return ""
    return f"{sum(vals) / len(vals):.6g}"


def cmd_lp_bounds(args: argparse.Namespace) -> int:
    g = _load_graph(args.instance, args.weights)
    rep = bound_report(Instance(g, args.k), optimum=args.optimum)
    doc = dataclasses.asdict(rep)
    for entry in doc["bounds"].values():
        entry["value"] = _round(entry["value"])
        if entry["gap"] is not None:
            entry["gap"] = _round(entry["gap"])
        entry["timing"] = {"seconds": entry.pop("seconds")}
    _emit(json.dumps(doc, indent=2), args.output)
    return EXIT_SOLVED


def cmd_oracle(args: argparse.Namespace) -> int:
    regime_text = args.regime
    if regime_text == "full":
        regime = Full()
    elif regime_text.startswith("cost:"):
        try:
            regime = CostBounded(float(regime_text[len("cost:"):]))
        except ValueError as exc:
            raise CliError(f"bad --regime value {regime_text!r}") from exc
    else:
        raise CliError(f"bad --regime value {regime_text!r}")
    g = _load_graph(args.instance, args.weights)
    try:
        res = brute_force(Instance(g, args.k), regime)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    doc = {"instance": g.name or args.instance, "n": g.n, "m": g.m, "k": args.k}
    if isinstance(res, OracleResult):
        doc |= {
            "status": "Optimal",
            "objective": _round(res.objective),
            "cut": [v + 1 for v in res.cut],
            "explored": res.explored,
        }
        code = EXIT_SOLVED
    elif isinstance(res, Infeasible):
        doc |= {"status": "Infeasible", "explored": res.explored}
        code = EXIT_INFEASIBLE
    else:
        assert isinstance(res, BudgetExceeded)
        doc |= {
            "status": "BudgetExceeded",
            "bound": _round(res.bound),
            "explored": res.explored,
        }
        code = EXIT_TIME_LIMIT
    _emit(json.dumps(doc, indent=2), args.output)
    return code


def cmd_gen_weights(args: argparse.Namespace) -> int:
    g = _load_graph(args.instance, "unit")
    costs = random_costs(g.n, args.seed)
    text = format_weights(
        costs, comment=f"weights for {g.name or args.instance} seed={args.seed}"
    )
    _emit(text.rstrip("\n"), args.output)
    return EXIT_SOLVED


def build_parser() -> _Parser:
    parser = _Parser(prog="kvcut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance to optimality")
    p.add_argument("instance")
    p.add_argument("--k", type=int, required=True)
    _weights_flag(p)
    _engine_flags(p)
    p.add_argument("--output", default=None, metavar="PATH")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="solve a batch and emit a CSV table")
    p.add_argument("instances", nargs="+")
    p.add_argument("--k", required=True, metavar="K1,K2,...")
    _weights_flag(p)
    _engine_flags(p)
    p.add_argument("--output", default=None, metavar="PATH")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("lp-bounds", help="root bounds of all formulations")
    p.add_argument("instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--optimum", type=float, default=None)
    _weights_flag(p)
    p.add_argument("--output", default=None, metavar="PATH")
    p.set_defaults(func=cmd_lp_bounds)

    p = sub.add_parser("oracle", help="brute-force ground truth")
    p.add_argument("instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--regime", default="full", metavar="full|cost:<limit>")
    _weights_flag(p)
    p.add_argument("--output", default=None, metavar="PATH")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen-weights", help="random vertex weights, uniform 1..10")
    p.add_argument("instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", default=None, metavar="PATH")
    p.set_defaults(func=cmd_gen_weights)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"kvcut: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover - exercised via console script
    sys.exit(main())
