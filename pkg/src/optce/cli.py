"""Command-line front end: ``optce <command> ...``.

Exit status: 0 when every guarantee the command reports is certified, 1 when
a result was computed but fails its check (or a sweep row failed), 2 on bad
input or a capacity limit.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import io
from .aggregative import AggregativeGame
from .bench import BenchmarkSpec, run_benchmark, write_report
from .errors import CapacityError, SolverError, StructuralViolation
from .gadgets import GadgetGame, build_gadget, verify_gadget_structure
from .generators import FAMILIES, generate
from .lp import LP_CAP, equilibrium_lp
from .mwmp import BRUTE_FORCE_CAP, GRID_CAP, aggregative_dp_mwmp, brute_force_mwmp, make_oracle
from .regret import cce_report, ce_report
from .solver import SolverConfig, binary_search_target, solve


def _env_cap(name, default):
    raw = os.environ.get(name)
    return int(raw) if raw else default


def caps():
    return {"lp": _env_cap("OPTCE_LP_CAP", LP_CAP),
            "brute": _env_cap("OPTCE_BRUTE_CAP", BRUTE_FORCE_CAP),
            "grid": _env_cap("OPTCE_GRID_CAP", GRID_CAP)}


def _emit(obj, path=None):
    text = io.dumps(obj)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _number(text):
    from fractions import Fraction
    return Fraction(text) if "/" in text else float(text)


def cmd_generate(args):
    kw = {"denominator": args.denominator} if args.denominator else {}
    game = generate(args.family, args.n, args.m, args.k, args.seed, **kw)
    if args.output:
        io.save_game(game, args.output)
    else:
        print(io.dumps(io.game_to_dict(game)))
    return 0


def _oracle(game, args):
    c = caps()
    return make_oracle(game, args.oracle, delta=args.delta, cap=c["brute"], grid_cap=c["grid"])


def cmd_solve(args):
    game = io.load_game(args.game)
    oracle = _oracle(game, args)
    try:
        if args.target == "search":
            res = binary_search_target(game, oracle, args.eps, args.mode)
            x, trace = res.distribution, res.trace
            extra = {"invocations": res.invocations, "search_time": res.wall_time}
        else:
            target = args.target if args.target == "lp" else _number(args.target)
            x, trace = solve(game, oracle, SolverConfig(args.eps, target, args.mode))
            extra = {}
    except SolverError as err:
        _emit({"certified": False, "error": f"{type(err).__name__}: {err}"})
        return 1
    if args.output:
        io.save_distribution(x, args.output)
    if args.trace:
        trace.write_csv(args.trace)
    cert = trace.certificate
    _emit({"certified": cert["ok"], "mode": trace.mode, "eps": args.eps, "target": trace.target,
           "iterations": trace.iterations, "budget": trace.budget,
           "final_distance": trace.final_distance, "max_regret": cert["max_regret"],
           "argmax": cert["argmax"], "objective": cert["objective"],
           "support_size": len(x), **extra})
    return 0 if cert["ok"] else 1


def cmd_verify(args):
    game = io.load_game(args.game)
    x = io.load_distribution(args.x)
    report = (cce_report if args.concept == "cce" else ce_report)(game, x, args.eps)
    _emit(report.to_dict(), args.output)
    return 0 if report.is_eps_equilibrium else 1


def cmd_lp_solve(args):
    game = io.load_game(args.game)
    sol = equilibrium_lp(game, args.concept, args.objective, args.direction, cap=caps()["lp"])
    _emit(sol.to_dict(), args.output)
    return 0


def cmd_mwmp(args):
    game = io.load_game(args.game)
    y = io.load_scaling(game, args.y)
    if isinstance(game, AggregativeGame) and args.delta is not None:
        delta = _number(args.delta)
        a, value = aggregative_dp_mwmp(game, y, delta, caps()["grid"])
        # value is the modified welfare of the discretized game
        out = {"profile": list(a), "value": float(value), "method": "aggdp", "delta": float(delta)}
    else:
        a, value = brute_force_mwmp(game, y, caps()["brute"])
        out = {"profile": list(a), "value": float(value), "method": "brute"}
    _emit(out, args.output)
    return 0


def cmd_gadget_build(args):
    base = io.load_game(args.base)
    eps = None if args.eps is None else _number(args.eps)
    g = build_gadget(base, args.opt if args.opt == "lp" else _number(args.opt), eps)
    io.save_game(g, args.output)
    print(io.dumps({"n": g.n, "m": list(g.action_counts), "opt": float(g.opt), "eps": float(g.eps)}))
    return 0


def cmd_gadget_verify(args):
    g = io.load_game(args.game)
    if not isinstance(g, GadgetGame):
        print("not a gadget game file", file=sys.stderr)
        return 2
    report = verify_gadget_structure(g, raise_on_failure=False)
    _emit(report.to_dict())
    return 0 if report.ok else 1


def cmd_bench(args):
    spec = BenchmarkSpec.load(args.spec)
    if args.output_dir:
        spec.output = args.output_dir
    rows = run_benchmark(spec, args.workers)
    path = write_report(rows, os.path.join(spec.output, "report.csv"))
    failed = sum(1 for r in rows if r["error"])
    print(io.dumps({"report": str(path), "rows": len(rows), "failed": failed}))
    return 1 if failed else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="optce", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded random game")
    p.add_argument("--family", choices=FAMILIES, default="random-explicit")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--denominator", type=int, help="rational utilities k/denominator")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="approximate optimal CE by regret-vector projection")
    p.add_argument("--game", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", default="ce", help="ce | cce | egal | pareto:q")
    p.add_argument("--target", default="lp", help="number, 'lp' or 'search'")
    p.add_argument("--oracle", choices=["auto", "brute", "aggdp"], default="auto")
    p.add_argument("--delta", type=_number, help="grid step for the aggregative DP oracle")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; solve is deterministic")
    p.add_argument("-o", "--output")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="max regret of a distribution")
    p.add_argument("--game", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--concept", choices=["ce", "cce"], default="ce")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lp-solve", help="exact best or worst equilibrium by LP")
    p.add_argument("--game", required=True)
    p.add_argument("--concept", choices=["ce", "cce"], default="ce")
    p.add_argument("--objective", default="welfare", help="welfare | egalitarian | player:q")
    p.add_argument("--direction", choices=["max", "min"], default="max")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_lp_solve)

    p = sub.add_parser("mwmp", help="maximize modified welfare for a scaling vector")
    p.add_argument("--game", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--delta")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mwmp)

    g = sub.add_parser("gadget", help="augmented-action gadget games")
    gsub = g.add_subparsers(dest="gadget_command", required=True)
    p = gsub.add_parser("build")
    p.add_argument("--base", required=True)
    p.add_argument("--opt", required=True, help="number, or 'lp' for the base's best CCE welfare")
    p.add_argument("--eps")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gadget_build)
    p = gsub.add_parser("verify")
    p.add_argument("game")
    p.set_defaults(func=cmd_gadget_verify)

    p = sub.add_parser("bench", help="benchmark sweep to CSV")
    p.add_argument("spec")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, ValueError, KeyError, OSError, StructuralViolation) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
