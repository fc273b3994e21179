"""Simulated parity games driven by a cop strategy, solved by memoised AND-OR search.

A position is ``(S, v, H, Pi)``: the current subgame ``S`` (a cop placement),
the pebble ``v``, a history ``H`` of at most one record and the trace ``Pi`` of
triples ``(u, c, w)`` seen in the current subgame.  Leaving ``S`` makes Player 0
promise a colour (or ``None`` for "never") for every vertex of ``S``; Player 1
either accepts one promise and jumps there, or rejects and the play moves on to
the subgame ``f(S, v')``.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .game_model import PARITY, ImperfectGame
from .graph_core import InvalidInput, bits
from .search_games import CopStrategy, solve_dag_width_game

Color = Optional[int]  # None stands for the "never reached" promise


def sig_key(c: int) -> tuple[int, int]:
    """Sort key under which better colours for Player 0 come first."""
    return (0, c) if c % 2 == 0 else (1, -c)


def sig_compare(a: int, b: int) -> int:
    """-1 if ``a`` is better for Player 0 than ``b``, 1 if worse, 0 if equal."""
    ka, kb = sig_key(a), sig_key(b)
    return (ka > kb) - (ka < kb)


def sig_le(a: int, b: int) -> bool:
    return sig_compare(a, b) <= 0


@dataclass(frozen=True)
class Record:
    """A promise ``P`` over ``F`` plus the least colour ``c`` seen since it was made."""

    F: frozenset[int]
    c: Color
    P: tuple[tuple[int, Color], ...]

    def promise(self, v: int) -> Color:
        return dict(self.P)[v]


History = tuple[Record, ...]  # oldest first


def update_record(rec: Record, c: int) -> Record:
    return Record(rec.F, c if rec.c is None else min(rec.c, c), rec.P)


def update_history(h: History, c: int) -> History:
    return tuple(update_record(rec, c) for rec in h)


def keep_last(h: History) -> History:
    """The forgetting rule: only the newest record survives."""
    return h[-1:]


def mincol(trace: Sequence[tuple[int, int, int]]) -> int:
    return min(c for _, c, _ in trace)


def ends_in_cycle(trace: Sequence[tuple[int, int, int]]) -> bool:
    return len(trace) > 1 and trace[-1] in trace[:-1]


def winner_of_cycle(trace: Sequence[tuple[int, int, int]]) -> int:
    """Parity of the least colour from the first occurrence of the repeated last triple."""
    if not ends_in_cycle(trace):
        raise ValueError("trace does not end in a cycle")
    start = trace.index(trace[-1])
    return mincol(trace[start:-1]) % 2


# A trace is kept as its first-occurrence order of triples, each paired with the
# least colour seen since that occurrence: exactly what the cycle rule and the
# promise check read, so traces with equal summaries are interchangeable.
Trace = tuple[tuple[tuple[int, int, int], int], ...]


def extend(trace: Trace, triple: tuple[int, int, int]) -> tuple[Trace, int | None]:
    """Append ``triple``; also return the cycle winner if it repeats an earlier triple."""
    c = triple[1]
    out = tuple((t, min(m, c)) for t, m in trace)
    for t, m in out:
        if t == triple:
            return out, m % 2
    return out + ((triple, c),), None


def extend_by_vertex(trace: Trace, triple: tuple[int, int, int]) -> tuple[Trace, int | None]:
    """Like :func:`extend`, but a cycle closes when the pebble revisits a vertex.

    The summary holds ``(vertex, least colour since its first visit)`` pairs,
    starting with the source of the first triple.
    """
    u, c, w = triple
    out = tuple((x, c if m is None else min(m, c)) for x, m in (trace or ((u, None),)))
    for x, m in out:
        if x == w:
            return out, m % 2
    return out + ((w, None),), None


def trace_min(trace: Trace) -> int | None:
    return trace[0][1] if trace else None


def induced_next_hist(g, f: CopStrategy) -> tuple[Callable[[int, int, History], int], Callable[[History], History]]:
    """``Next(S, v, H) = f(S, v)`` and the keep-last forgetting rule."""
    if f.graph.n != g.n:
        raise InvalidInput("strategy belongs to a different graph")

    def next_subgame(S: int, v: int, h: History) -> int:
        if S >> v & 1:
            raise InvalidInput(f"vertex {v} lies inside the subgame")
        return f.announce(S, 1 << v)

    return next_subgame, keep_last


def state_bound(n: int, k: int, colors: int) -> int:
    """``|V|^(k+2) |C|^(2k) k^k`` with one extra value per factor (the "never" promise, empty traces)."""
    return (n + 1) ** (k + 2) * (colors + 1) ** (2 * k) * (k + 1) ** k


@dataclass
class SimResult:
    winner: int
    k: int
    states: int
    max_depth: int
    initial_subgame: frozenset[int]


def cop_strategy_for(game: ImperfectGame, max_k: int | None = None) -> CopStrategy:
    """Least-cop non-monotone strategy, defined on every position the simulation can reach."""
    g = game.graph
    for k in range(0, (g.n if max_k is None else max_k) + 1):
        out = solve_dag_width_game(g, k, monotone=False, full_init=True)
        if out.cop_win:
            return out.strategy
    raise InvalidInput(f"no cop strategy with at most {max_k} cops")


CYCLE_RULES = {"triple": extend, "vertex": extend_by_vertex}


def simulate_solve(game: ImperfectGame, f: CopStrategy | None = None,
                   cycle_rule: str = "vertex") -> SimResult:
    """Winner at the initial position of the simulated game built from ``f``.

    ``cycle_rule`` picks when a trace closes a cycle: on an exact repeated
    triple, or on a repeated pebble vertex (far fewer states).
    """
    if not game.is_perfect():
        raise InvalidInput("simulated games need perfect information")
    if game.condition.kind != PARITY:
        raise InvalidInput("simulated games need a parity condition")
    if cycle_rule not in CYCLE_RULES:
        raise InvalidInput(f"unknown cycle rule {cycle_rule!r}")
    extend_trace = CYCLE_RULES[cycle_rule]
    g = game.graph
    f = f or cop_strategy_for(game)
    next_subgame, hist = induced_next_hist(g, f)
    col = game.color
    owner = game.owner
    palette = sorted(set(col), key=sig_key)
    bound = state_bound(g.n, f.k, len(palette))
    memo: dict[tuple, bool] = {}
    on_stack: set[tuple] = set()
    depth = [0, 0]

    def settle(S: int, x: int, h: History, trace: Trace, cycle: int | None) -> bool:
        """Steps 5 and 6, then the next round."""
        if h and x in h[-1].F:
            rec = h[-1]
            p = rec.promise(x)
            if p is None:
                return False
            seen = rec.c if trace_min(trace) is None else min(trace_min(trace), rec.c)
            return sig_le(seen, p)
        if cycle is not None:
            return cycle == 0
        return round_(S, x, h, trace)

    def leave(S: int, h: History, trace: Trace, v2: int) -> bool:
        """Steps 3 and 4 after the pebble left ``S`` for ``v2``; Player 0 picks the profile."""
        members = list(bits(S))
        accept: dict[tuple[int, int], bool] = {}

        def accepted(w: int, c: int) -> bool:
            key = (w, c)
            if key not in accept:
                accept[key] = settle(S, w, h, *extend_trace(trace, (v2, min(col[v2], c), w)))
            return accept[key]

        S2 = next_subgame(S, v2, h)
        for profile in itertools.product(*[palette + [None] for _ in members]):
            if not all(c is None or accepted(w, c) for w, c in zip(members, profile)):
                continue
            rec = Record(frozenset(members), col[v2], tuple(zip(members, profile)))
            h3 = hist(update_history(h, col[v2]) + (rec,))
            if settle(S2, v2, h3, (), None):
                return True
        return False

    def step(S: int, v: int, h: History, trace: Trace, v2: int) -> bool:
        if S >> v2 & 1 or (h and v2 in h[-1].F):
            return settle(S, v2, h, *extend_trace(trace, (v, col[v2], v2)))
        return leave(S, h, trace, v2)

    def round_(S: int, v: int, h: History, trace: Trace) -> bool:
        key = (S, v, h, trace)
        if key in memo:
            return memo[key]
        if key in on_stack:
            raise RuntimeError(f"simulated play revisits {key}; the cop strategy does not bound plays")
        on_stack.add(key)
        depth[0] += 1
        depth[1] = max(depth[1], depth[0])
        if depth[0] > bound or len(memo) > bound:
            raise RuntimeError(f"simulated play exceeds the state bound {bound}")
        succs = list(bits(g.succ[v]))
        if owner[v] == 0:
            val = any(step(S, v, h, trace, w) for w in succs)
        else:
            val = all(step(S, v, h, trace, w) for w in succs)
        depth[0] -= 1
        on_stack.discard(key)
        memo[key] = val
        return val

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 50_000))
    v0 = game.initial
    S0 = next_subgame(0, v0, ())
    win = round_(S0, v0, (), ())
    return SimResult(0 if win else 1, f.k, len(memo), depth[1], frozenset(bits(S0)))


__all__ = [
    "sig_key", "sig_compare", "sig_le", "Record", "update_record", "update_history", "keep_last",
    "mincol", "winner_of_cycle", "extend", "extend_by_vertex", "induced_next_hist", "state_bound", "SimResult",
    "cop_strategy_for", "simulate_solve",
]
