"""Command-line interface.

Subcommands: solve, propagate, oracle, gen-snark, experiment.  All index
lists on the command line and in printed output are 1-based.  Every option
can also be set in a JSON config file passed via ``--config``; explicit
command-line flags win over config values.

Exit codes: 0 success (optimal / feasible report), 1 infeasible,
2 time limit reached, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

from . import bench, oracle
from .core import FixState, Permutation
from .solver import (MODES, RELABELS, BinaryProgram, Settings,
                     node_propagate, solve)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_TIMELIMIT = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits with code 2
        raise UsageError(message)


def _parse_fix_list(text: Optional[str], n: int, what: str) -> List[int]:
    if not text:
        return []
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            i = int(part)
        except ValueError:
            raise UsageError("%s: %r is not an integer" % (what, part))
        if not 1 <= i <= n:
            raise UsageError("%s: index %d outside 1..%d" % (what, i, n))
        out.append(i - 1)
    return out


def _fmt_indices(indices) -> str:
    return ",".join(str(i + 1) for i in sorted(indices)) or "-"


def _apply_config(args: argparse.Namespace, argv: Sequence[str]) -> None:
    """Fill options from the config file; explicit flags take precedence."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            conf = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("config %s: %s" % (args.config, exc))
    if not isinstance(conf, dict):
        raise UsageError("config must be a JSON object")
    explicit = {tok.split("=", 1)[0].lstrip("-").replace("-", "_")
                for tok in argv if tok.startswith("--")}
    for key, val in conf.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError("config: unknown option %r" % key)
        if attr not in explicit:
            setattr(args, attr, val)


def _load_instance(path: Optional[str]):
    if not path:
        raise UsageError("--instance is required")
    try:
        return bench.parse_instance(path)
    except (OSError, bench.InstanceError) as exc:
        raise UsageError(str(exc))


def _fix_state(args, bp: BinaryProgram) -> FixState:
    fs = FixState(bp.n)
    for i in _parse_fix_list(getattr(args, "fix0", None), bp.n, "--fix0"):
        fs.fixed0.add(i)
    for i in _parse_fix_list(getattr(args, "fix1", None), bp.n, "--fix1"):
        fs.fixed1.add(i)
    if not fs.is_consistent():
        raise UsageError("--fix0 and --fix1 overlap")
    return fs


def _cmd_solve(args, argv) -> int:
    name, bp = _load_instance(args.instance)
    settings = Settings(
        mode=args.mode, relabel=args.relabel, seed=args.seed,
        time_limit=args.time_limit)
    res = solve(bp, settings)
    print("instance: %s" % name)
    print("status: %s" % res.status)
    if res.objective is not None:
        print("objective: %.6g" % res.objective)
    if res.incumbent is not None:
        ones = [i for i, b in enumerate(res.incumbent) if b]
        print("ones: %s" % _fmt_indices(ones))
    print("nodes: %d" % res.nodes)
    print("sym_fixings: %d" % res.sym_fixings)
    print("time: %.3f" % res.wall_time)
    if res.status == "infeasible":
        return EXIT_INFEASIBLE
    if res.status == "timelimit":
        return EXIT_TIMELIMIT
    return EXIT_OK


def _cmd_propagate(args, argv) -> int:
    name, bp = _load_instance(args.instance)
    fs = _fix_state(args, bp)
    res = node_propagate(bp, fs.copy(), Settings(mode=args.mode))
    if not res.feasible:
        print("infeasible")
        return EXIT_INFEASIBLE
    print("fixed0 added: %s" % _fmt_indices(res.fixed0 - fs.fixed0))
    print("fixed1 added: %s" % _fmt_indices(res.fixed1 - fs.fixed1))
    return EXIT_OK


def _group_closure(generators: Sequence[Permutation], limit: int = 100000):
    """All non-identity elements of the generated group, BFS closure."""
    if not generators:
        return []
    ident = Permutation.identity(generators[0].n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in generators:
                p = h.compose(g)
                if p not in seen:
                    if len(seen) >= limit:
                        raise UsageError(
                            "generated group exceeds %d elements" % limit)
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return [g for g in seen if not g.is_identity()]


def _cmd_oracle(args, argv) -> int:
    name, bp = _load_instance(args.instance)
    fs = _fix_state(args, bp)
    perms = _group_closure(bp.generators)
    if not perms:
        raise UsageError("instance declares no symmetry generators")
    try:
        res = oracle.complete_fixings_oracle(perms, fs, cap=args.cap)
    except oracle.CapacityError as exc:
        raise UsageError(str(exc))
    if not res.feasible:
        print("infeasible")
        return EXIT_INFEASIBLE
    print("fixed0 added: %s" % _fmt_indices(res.fixed0 - fs.fixed0))
    print("fixed1 added: %s" % _fmt_indices(res.fixed1 - fs.fixed1))
    return EXIT_OK


def _cmd_gen_snark(args, argv) -> int:
    try:
        name, bp = bench.gen_snark(args.n)
    except ValueError as exc:
        raise UsageError(str(exc))
    if not args.out:
        raise UsageError("--out is required")
    bench.write_instance(name, bp, args.out)
    print("wrote %s (%d variables, %d rows)" % (args.out, bp.n, len(bp.rows)))
    return EXIT_OK


def _cmd_experiment(args, argv) -> int:
    if not args.grid:
        raise UsageError("--grid is required")
    try:
        with open(args.grid, "r", encoding="utf-8") as fh:
            grid = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("grid %s: %s" % (args.grid, exc))
    known = {"instances", "modes", "relabels", "seeds", "time_limit", "jobs"}
    unknown = set(grid) - known
    if unknown:
        raise UsageError("grid: unknown keys %s" % ", ".join(sorted(unknown)))
    try:
        instances = [bench.parse_instance(p) for p in grid["instances"]]
    except KeyError:
        raise UsageError("grid: missing key 'instances'")
    except (OSError, bench.InstanceError) as exc:
        raise UsageError(str(exc))
    try:
        report = bench.run_experiment(
            instances,
            modes=grid.get("modes", list(MODES)),
            relabels=grid.get("relabels", list(RELABELS)),
            seeds=grid.get("seeds", [0]),
            time_limit=grid.get("time_limit"),
            jobs=int(grid.get("jobs", args.jobs)),
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    text = report.to_text()
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> _Parser:
    top = _Parser(prog="cycfix",
                  description="Symmetry-based fixing propagation for binary "
                              "programs under cyclic groups.")
    sub = top.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="JSON file with option defaults; "
                                        "command-line flags win")

    p = sub.add_parser("solve", help="branch-and-bound solve")
    common(p)
    p.add_argument("--instance")
    p.add_argument("--mode", choices=MODES, default="peek")
    p.add_argument("--relabel", choices=RELABELS, default="original")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("propagate", help="one propagation round at a node")
    common(p)
    p.add_argument("--instance")
    p.add_argument("--fix0", help="comma-separated 1-based indices fixed to 0")
    p.add_argument("--fix1", help="comma-separated 1-based indices fixed to 1")
    p.add_argument("--mode", choices=MODES, default="peek")
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("oracle", help="exhaustive ground-truth fixings")
    common(p)
    p.add_argument("--instance")
    p.add_argument("--fix0")
    p.add_argument("--fix1")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP,
                   help="max unfixed entries to enumerate")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen-snark", help="write a flower-snark instance")
    common(p)
    p.add_argument("--n", type=int, required=False)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen_snark)

    p = sub.add_parser("experiment", help="run a solve grid, emit a report")
    common(p)
    p.add_argument("--grid", help="JSON grid description")
    p.add_argument("--out", help="report path, '-' for stdout")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)
    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help()
            return EXIT_USAGE
        _apply_config(args, argv)
        if args.command == "gen-snark" and args.n is None:
            raise UsageError("--n is required")
        return args.func(args, argv)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
