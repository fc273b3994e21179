"""Command line front end: ``iipg <subcommand> ...``.

stdout carries ``key value`` lines, stderr human diagnostics.  Exit codes:
0 success, 1 usage error, 2 invalid input.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import generators as gen
from .game_model import SEQ, ImperfectGame, WinningCondition, parse_game, serialize_game, validate
from .graph_core import DiGraph, InvalidInput, bits, parse_digraph, serialize_digraph
from .parity_solver import reduce_sequence_forcing, solve
from .powerset import powerset_construct
from .search_games import (dag_width, directed_path_width, entanglement, multi_robber_width,
                           nmdw, tree_width)
from .simulated import simulate_solve
from .strategy_lift import lift_dpw, lift_dw_nonmonotone, replay_lifted


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None


def _first_token(text: str) -> str:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            return line.split()[0]
    return ""


def load_game(path: str) -> ImperfectGame:
    return parse_game(_read(path))


def load_graph(path: str, use_powerset: bool = False) -> DiGraph:
    """A digraph file, or the graph of a game file (optionally of its powerset game)."""
    text = _read(path)
    if _first_token(text) == "iipg":
        game = parse_game(text)
        return powerset_construct(game).game.graph if use_powerset else game.graph
    if use_powerset:
        raise InvalidInput("--powerset needs a game file")
    return parse_digraph(text)


def solve_any(game: ImperfectGame):
    """Reduce sequence forcing, build the powerset game if needed, and solve."""
    if game.condition.kind == SEQ:
        game = reduce_sequence_forcing(game)
    if not game.is_perfect():
        game = powerset_construct(game).game
    return game, solve(game)


def _fmt(vs) -> str:
    return " ".join(str(v) for v in sorted(vs)) or "-"


# -- subcommands ----------------------------------------------------------------------

def _solve_one(path: str, regions: bool, strategy: bool, override: WinningCondition | None) -> list[str]:
    game = load_game(path)
    if override is not None:
        game = game.replace(condition=override)
    solved, res = solve_any(game)
    out = [f"winner {res.winner(solved.initial)}"]
    if regions:
        out += [f"win0 {_fmt(res.win0)}", f"win1 {_fmt(res.win1)}"]
    if strategy:
        for player, strat in ((0, res.strat0), (1, res.strat1)):
            for v, (a, d) in sorted(strat.items()):
                out.append(f"strategy{player} {v} {a} {'-' if d is None else d}")
    return out


def cmd_solve(args) -> int:
    override = None
    if args.reach is not None:
        override = WinningCondition.reach(args.reach)
    elif args.safe is not None:
        override = WinningCondition.safe(args.safe)
    elif args.parity:
        override = WinningCondition.parity()
    return _batch(args, _solve_one, args.regions, args.strategy, override)


def _validate_one(path: str) -> list[str]:
    problems = validate(load_game(path))
    if problems:
        raise InvalidInput("; ".join(str(p) for p in problems))
    return ["ok"]


def cmd_validate(args) -> int:
    return _batch(args, _validate_one)


def _expand(paths: list[str]) -> list[str]:
    out = []
    for p in paths:
        if p != "-" and Path(p).is_dir():
            out += sorted(str(q) for q in Path(p).iterdir() if q.is_file())
        else:
            out.append(p)
    return out


def _run_safe(fn, path, *extra):
    try:
        return 0, fn(path, *extra)
    except InvalidInput as exc:
        return 2, [str(exc)]


def _batch(args, fn, *extra) -> int:
    files = _expand(args.files)
    if args.jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_safe, [fn] * len(files), files, *[[e] * len(files) for e in extra]))
    else:
        results = [_run_safe(fn, f, *extra) for f in files]
    code = 0
    for path, (status, lines) in zip(files, results):
        prefix = f"{path} " if len(files) > 1 else ""
        if status:
            print(f"{path}: {lines[0]}", file=sys.stderr)
            print(f"{prefix}invalid")
            code = 2
        else:
            for line in lines:
                print(prefix + line)
    return code


def cmd_powerset(args) -> int:
    pg = powerset_construct(load_game(args.file))
    sys.stdout.write(serialize_game(pg.game))
    for i, m in enumerate(pg.members):
        print(f"# members {i} : {' '.join(map(str, m))}")
    print(f"positions {pg.n}", file=sys.stderr)
    return 0


def cmd_width(args) -> int:
    g = load_graph(args.file, args.powerset)
    m = args.measure
    if m == "dw":
        rep = multi_robber_width(g, args.robbers, restricted=args.restricted) if args.robbers > 1 \
            else dag_width(g, restricted=args.restricted)
    elif m == "nmdw":
        rep = nmdw(g)
    elif m == "tw":
        rep = tree_width(g)
    elif m == "ent":
        rep = entanglement(g)
    else:
        rep = directed_path_width(g)
    print(f"{m} {rep.value}")
    print(f"cops {rep.cops}")
    print(f"vertices {g.n}")
    if args.witness:
        if m == "dpw":
            for i, u in enumerate(rep.extra["play"].placements):
                print(f"place {i + 1} {_fmt(bits(u))}")
        elif rep.witness is not None:
            for cfg, nxt in sorted(rep.witness.moves.items(), key=lambda kv: (sorted(kv[0].cops), sorted(kv[0].robbers))):
                print(f"move {_fmt(cfg.cops)} | {_fmt(cfg.robbers)} -> {_fmt(nxt)}")
    return 0


def cmd_simulate(args) -> int:
    res = simulate_solve(load_game(args.file), cycle_rule=args.cycle_rule)
    print(f"winner {res.winner}")
    print(f"cops {res.k}")
    print(f"states {res.states}")
    print(f"depth {res.max_depth}")
    return 0


def cmd_lift(args) -> int:
    game = load_game(args.file)
    g = game.graph
    pg = powerset_construct(game)
    if args.kind == "dw":
        rep = nmdw(g)
        strat = lift_dw_nonmonotone(game, rep.witness, pg=pg, verify=False)
        res = replay_lifted(strat)
        if not res.captured:
            print("lifted strategy lets the robber escape", file=sys.stderr)
            return 2
        print(f"source_cops {rep.cops}")
        print(f"max_cops {res.max_cops}")
        print(f"budget {strat.budget}")
        print(f"plays {res.plays_checked}")
        print(f"monotone {str(res.monotone).lower()}")
    else:
        rep = directed_path_width(g)
        play = rep.extra["play"]
        lifted = lift_dpw(game, play, pg=pg)
        print(f"source_cops {play.max_cops()}")
        print(f"max_cops {lifted.max_cops()}")
        print(f"steps {len(lifted.placements)}")
        print(f"monotone {str(lifted.is_monotone()).lower()}")
        print(f"clears {str(lifted.clears()).lower()}")
    return 0


def cmd_generate(args) -> int:
    fam, params = args.family, args.params
    need = {"cycles": 1, "paths": 1, "halfgrid": 1, "doubletree": 1, "fig4": 0,
            "lextree": 2, "offhanded": 1, "random": 0, "digraph": 2}
    if fam not in need:
        raise UsageError(f"unknown family {fam!r}; choose from {', '.join(need)}")
    if len(params) != need[fam]:
        raise UsageError(f"{fam} takes {need[fam]} integer parameter(s)")
    if fam == "random":
        out = gen.gen_random(gen.RandomSpec(n=args.n, colors=args.colors, r=args.r, max_out=args.max_out,
                                            acyclic=args.acyclic, condition=args.condition, seed=args.seed))
    elif fam == "digraph":
        out = gen.gen_random_digraph(params[0], params[1] / 100, args.seed)
    else:
        out = gen.FAMILIES[fam](*params)
    sys.stdout.write(serialize_game(out) if isinstance(out, ImperfectGame) else serialize_digraph(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="iipg", description="Games with imperfect information and graph searching games.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="winner of a game (powerset first if needed)")
    s.add_argument("files", nargs="+", help="game files or directories ('-' for stdin)")
    s.add_argument("--regions", action="store_true", help="print both winning regions")
    s.add_argument("--strategy", action="store_true", help="print positional strategies")
    s.add_argument("--jobs", type=int, default=1)
    cond = s.add_mutually_exclusive_group()
    cond.add_argument("--reach", type=int, nargs="+", metavar="V", help="override with a reachability target")
    cond.add_argument("--safe", type=int, nargs="+", metavar="V", help="override with a safety condition")
    cond.add_argument("--parity", action="store_true", help="override with the parity condition")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("validate", help="check the observability conditions")
    s.add_argument("files", nargs="+")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("powerset", help="write the knowledge-set game with a '# members' comment block")
    s.add_argument("file")
    s.set_defaults(func=cmd_powerset)

    s = sub.add_parser("width", help="exact width measures by solving search games")
    s.add_argument("file", help="digraph or game file")
    s.add_argument("--measure", choices=["dw", "nmdw", "tw", "ent", "dpw"], default="dw")
    s.add_argument("--robbers", type=int, default=1)
    s.add_argument("--restricted", choices=["reach", "flap"])
    s.add_argument("--powerset", action="store_true", help="measure the powerset graph of a game")
    s.add_argument("--witness", action="store_true", help="print the cop strategy or play")
    s.set_defaults(func=cmd_width)

    s = sub.add_parser("simulate", help="solve a perfect-information parity game by simulation")
    s.add_argument("file")
    s.add_argument("--cycle-rule", choices=["vertex", "triple"], default="vertex")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("lift", help="lift a cop strategy to the powerset graph and check it")
    s.add_argument("file")
    s.add_argument("--kind", choices=["dw", "dpw"], default="dw")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("generate", help="write a family member or a random instance")
    s.add_argument("family")
    s.add_argument("params", nargs="*", type=int,
                   help="family parameters; digraph takes n and an edge percentage")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--colors", type=int, default=3)
    s.add_argument("--r", type=int, default=2)
    s.add_argument("--max-out", type=int, default=2)
    s.add_argument("--acyclic", action="store_true")
    s.add_argument("--condition", choices=["parity", "reach", "safe"], default="parity")
    s.set_defaults(func=cmd_generate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"iipg: error: {exc}", file=sys.stderr)
        return 1
    except InvalidInput as exc:
        print(f"iipg: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
