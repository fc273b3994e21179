"""Exact solvers for cops-and-robber games on digraphs and the widths they define.

All games are reachability games for the cops: the state space is explored
explicitly (``_kernels``) and solved by backward induction.  The robber is
abstracted by his *territory*: the set of vertices reachable from his
position(s) avoiding the current cops.  Robbers always prefer the largest
territories, which lets one state stand for many robber placements.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import _kernels as K
from .graph_core import DiGraph, InvalidInput, bits, reach, source_flaps, symmetric_closure

MONOTONE_LIMIT = 62
GENERAL_LIMIT = 31
RESTRICT_CODES = {None: 0, "reach": 1, "flap": 2}

DW, NMDW, DPW, TW, ENT, DWR = "dw", "nmdw", "dpw", "tw", "ent", "dwr"


@dataclass(frozen=True)
class SearchConfig:
    """Cop-turn position ``(U, R)`` or robber-turn position ``(U, U', R)``."""

    cops: frozenset[int]
    robbers: frozenset[int]
    announced: frozenset[int] | None = None

    @property
    def robber_turn(self) -> bool:
        return self.announced is not None


def front(g: DiGraph, v: int, blocked: int) -> int:
    """Members of ``blocked`` reachable from ``v`` by paths whose interior avoids ``blocked``."""
    if blocked >> v & 1:
        raise InvalidInput(f"vertex {v} lies in the blocking set")
    return g.out_mask(reach(g, 1 << v, blocked)) & blocked


def _arrays(g: DiGraph) -> tuple[np.ndarray, np.ndarray]:
    return np.array(g.succ, dtype=np.int64), np.array(g.pred, dtype=np.int64)


def _cop_sets(n: int, k: int) -> np.ndarray:
    out = [0]
    for size in range(1, min(k, n) + 1):
        for combo in itertools.combinations(range(n), size):
            out.append(sum(1 << v for v in combo))
    return np.array(out, dtype=np.int64)


def _initial_territories(g: DiGraph, r: int) -> list[int]:
    """Robber territories available for the opening move from bottom."""
    if g.n == 0:
        return []
    flaps = source_flaps(g, g.full)
    if len(flaps) <= r:
        return [g.full]
    closures = [reach(g, f) for f in flaps]
    return sorted({_union(c) for c in itertools.combinations(closures, r)})


def _union(masks: Iterable[int]) -> int:
    out = 0
    for m in masks:
        out |= m
    return out


@dataclass
class _Solved:
    """An explored and solved state space."""

    states: np.ndarray
    opt_ptr: np.ndarray
    opt_move: np.ndarray
    succ_ptr: np.ndarray
    succ_idx: np.ndarray
    won: np.ndarray
    choice: np.ndarray
    rank: np.ndarray
    index: dict[int, int] = field(default_factory=dict)

    @classmethod
    def build(cls, explored: tuple) -> "_Solved":
        states, opt_ptr, opt_move, succ_ptr, succ_idx = explored
        won, choice, rank = K.solve_andor(opt_ptr, succ_ptr, succ_idx)
        index = {int(s): i for i, s in enumerate(states)}
        return cls(states, opt_ptr, opt_move, succ_ptr, succ_idx, won, choice, rank, index)

    def move(self, key: int) -> int | None:
        i = self.index.get(key)
        if i is None or not self.won[i]:
            return None
        return int(self.opt_move[self.choice[i]])

    def is_won(self, key: int) -> bool | None:
        i = self.index.get(key)
        return None if i is None else bool(self.won[i])


class CopStrategy:
    """Positional cop strategy: ``announce(U, R)`` returns the next placement ``U'``.

    ``kind`` names the game (dw, nmdw, ent, dpw, dwr); ``k`` is the cop budget.
    Table-backed strategies answer positions they have not explored yet by
    solving the game from there on demand.
    """

    def __init__(self, g: DiGraph, kind: str, k: int, monotone: bool, r: int = 1,
                 announce: Callable[[int, int], int] | None = None):
        self.graph = g
        self.kind = kind
        self.k = k
        self.monotone = monotone
        self.r = r
        self._announce = announce

    def announce(self, cops: int, robbers: int) -> int:
        if self._announce is None:
            raise NotImplementedError
        return self._announce(cops, robbers)

    @property
    def moves(self) -> dict[SearchConfig, frozenset[int]]:
        """Explored part of the strategy as ``SearchConfig -> U'``."""
        return {}


class _TerritoryStrategy(CopStrategy):
    """Strategy from the territory-based engines (monotone or general)."""

    def __init__(self, g: DiGraph, kind: str, k: int, monotone: bool, r: int,
                 restricted: str | None, solved: _Solved, general: bool):
        super().__init__(g, kind, k, monotone, r)
        self.restricted = restricted
        self.general = general
        self._parts = [solved]

    def _key(self, cops: int, territory: int) -> int:
        return (cops << 32 | territory) if self.general else territory

    def _lookup(self, key: int) -> int | None:
        for part in self._parts:
            mv = part.move(key)
            if mv is not None:
                return mv
        return None

    def announce(self, cops: int, robbers: int) -> int:
        g = self.graph
        territory = reach(g, robbers, cops)
        if not territory:
            return cops
        if not self.general:
            cops = g.out_mask(territory) & ~territory
        key = self._key(cops, territory)
        mv = self._lookup(key)
        if mv is None:
            part = _explore(g, self.k, self.r, self.monotone, self.restricted, self.general, [key])
            self._parts.append(part)
            mv = part.move(key)
            if mv is None:
                raise InvalidInput(f"cops with budget {self.k} lose from cops={sorted(bits(cops))} "
                                   f"territory={sorted(bits(territory))}")
        if self.general:
            return mv
        return (g.out_mask(territory) & ~territory) | mv

    @property
    def moves(self) -> dict[SearchConfig, frozenset[int]]:
        out = {}
        g = self.graph
        for part in self._parts:
            for key, i in part.index.items():
                if not part.won[i]:
                    continue
                mv = int(part.opt_move[part.choice[i]])
                if self.general:
                    u, z = key >> 32, key & 0xFFFFFFFF
                else:
                    z = key
                    u = g.out_mask(z) & ~z
                    mv |= u
                out[SearchConfig(frozenset(bits(u)), frozenset(bits(z)))] = frozenset(bits(mv))
        return out


def _explore(g: DiGraph, k: int, r: int, monotone: bool, restricted: str | None,
             general: bool, inits: list[int], full_init: bool = False) -> _Solved:
    succ, pred = _arrays(g)
    if general:
        if g.n > GENERAL_LIMIT:
            raise InvalidInput(f"general search supports at most {GENERAL_LIMIT} vertices, got {g.n}")
        cop_sets = _cop_sets(g.n, k)
        if full_init:
            keys = set(inits)
            for u in cop_sets:
                u = int(u)
                for v in range(g.n):
                    if not u >> v & 1:
                        keys.add(u << 32 | reach(g, 1 << v, u))
            inits = sorted(keys)
        explored = K.explore_general(succ, pred, g.n, r, monotone, RESTRICT_CODES[restricted],
                                     cop_sets, np.array(inits, dtype=np.int64))
    else:
        if g.n > MONOTONE_LIMIT:
            raise InvalidInput(f"monotone search supports at most {MONOTONE_LIMIT} vertices, got {g.n}")
        explored = K.explore_monotone(succ, pred, g.n, k, r, restricted == "flap",
                                      np.array(inits, dtype=np.int64))
    return _Solved.build(explored)


@dataclass
class GameOutcome:
    cop_win: bool
    strategy: CopStrategy | None
    escape: SearchConfig | None
    states: int


def solve_dag_width_game(g: DiGraph, k: int, monotone: bool = True, restricted: str | None = None,
                         r: int = 1, engine: str = "auto", full_init: bool = False) -> GameOutcome:
    """Decide whether ``k`` cops catch ``r`` robbers; return a strategy or an escape.

    ``restricted``: None, ``"reach"`` (new cops must be robber-reachable) or
    ``"flap"`` (new cops must lie in the robber's own strongly connected flap).
    ``engine``: ``"auto"`` uses the territory-only engine for monotone games and
    the ``(U, Z)`` engine otherwise; ``"general"`` forces the latter.
    """
    if k < 0:
        raise InvalidInput(f"cop budget must be non-negative, got {k}")
    if r < 1:
        raise InvalidInput(f"robber count must be at least 1, got {r}")
    if restricted not in RESTRICT_CODES:
        raise InvalidInput(f"unknown restriction {restricted!r}")
    general = engine == "general" or not monotone or full_init
    kind = (DW if monotone else NMDW) if r == 1 else DWR
    inits = _initial_territories(g, r)
    if not inits:
        return GameOutcome(True, CopStrategy(g, kind, k, monotone, r, lambda u, z: u), None, 0)
    # with U = 0 the general key U << 32 | Z is just Z
    solved = _explore(g, k, r, monotone, restricted, general, inits, full_init)
    for z in inits:
        if not solved.is_won(z):
            return GameOutcome(False, None, SearchConfig(frozenset(), frozenset(bits(z))), len(solved.states))
    strat = _TerritoryStrategy(g, kind, k, monotone, r, restricted, solved, general)
    return GameOutcome(True, strat, None, len(solved.states))


@dataclass
class WidthReport:
    """``value`` is the width (cops - 1 for tw and dpw, the cop number otherwise)."""

    measure: str
    value: int
    cops: int
    witness: CopStrategy | None = None
    escape: SearchConfig | None = None
    monotone: bool = True
    robbers: int = 1
    extra: dict = field(default_factory=dict)


def _ascend(n: int, solve: Callable[[int], GameOutcome], start: int = 0, stop: int | None = None):
    last_escape = None
    for k in range(start, (n if stop is None else stop) + 1):
        out = solve(k)
        if out.cop_win:
            return k, out, last_escape
        last_escape = out.escape
    return None, None, last_escape


def multi_robber_width(g: DiGraph, r: int, monotone: bool = True, restricted: str | None = None,
                       engine: str = "auto") -> WidthReport:
    if r < 1:
        raise InvalidInput(f"robber count must be at least 1, got {r}")
    k, out, esc = _ascend(g.n, lambda k: solve_dag_width_game(g, k, monotone, restricted, r, engine))
    measure = DWR if r > 1 else (DW if monotone else NMDW)
    return WidthReport(measure, k, k, out.strategy, esc, monotone, r)


def dag_width(g: DiGraph, monotone: bool = True, restricted: str | None = None,
              engine: str = "auto") -> WidthReport:
    return multi_robber_width(g, 1, monotone, restricted, engine)


def nmdw(g: DiGraph) -> WidthReport:
    return dag_width(g, monotone=False)


def tree_width(g: DiGraph, monotone: bool = True) -> WidthReport:
    rep = dag_width(symmetric_closure(g), monotone)
    return WidthReport(TW, max(rep.cops - 1, 0), rep.cops, rep.witness, rep.escape, monotone)


# -- entanglement ------------------------------------------------------------

class _EntStrategy(CopStrategy):
    def __init__(self, g: DiGraph, k: int, solved: _Solved):
        super().__init__(g, ENT, k, False)
        self._solved = solved

    def announce(self, cops: int, robbers: int) -> int:
        (v,) = bits(robbers)
        mv = self._solved.move(cops * 64 + v)
        if mv is None:
            raise InvalidInput(f"no winning entanglement move at cops={sorted(bits(cops))} robber={v}")
        return mv

    @property
    def moves(self) -> dict[SearchConfig, frozenset[int]]:
        s = self._solved
        return {SearchConfig(frozenset(bits(key >> 6)), frozenset([key & 63])):
                frozenset(bits(int(s.opt_move[s.choice[i]])))
                for key, i in s.index.items() if s.won[i]}


def solve_entanglement_game(g: DiGraph, k: int) -> GameOutcome:
    if g.n > 57:
        raise InvalidInput(f"entanglement search supports at most 57 vertices, got {g.n}")
    if g.n == 0:
        return GameOutcome(True, _EntStrategy(g, k, None), None, 0)
    succ, _ = _arrays(g)
    solved = _Solved.build(K.explore_entanglement(succ, g.n, k))
    for v in range(g.n):
        if not solved.is_won(v):
            return GameOutcome(False, None, SearchConfig(frozenset(), frozenset([v])), len(solved.states))
    return GameOutcome(True, _EntStrategy(g, k, solved), None, len(solved.states))


def entanglement(g: DiGraph) -> WidthReport:
    k, out, esc = _ascend(g.n, lambda k: solve_entanglement_game(g, k))
    return WidthReport(ENT, k, k, out.strategy, esc, False)


# -- directed path-width -----------------------------------------------------------

@dataclass
class DpwPlay:
    """Cop placements ``U_1..U_m`` of a clearing play, starting from no cops and R = V."""

    graph: DiGraph
    placements: list[int]

    def contaminated(self) -> list[int]:
        """``R_0 = V`` followed by the contaminated set after each placement."""
        g = self.graph
        out = [g.full]
        prev = 0
        for u in self.placements:
            out.append(reach(g, out[-1], prev & u) & ~u)
            prev = u
        return out

    def is_monotone(self) -> bool:
        rs = self.contaminated()
        return all(b & ~a == 0 for a, b in zip(rs, rs[1:]))

    def clears(self) -> bool:
        return self.contaminated()[-1] == 0

    def max_cops(self) -> int:
        return max((u.bit_count() for u in self.placements), default=0)


def solve_dpw_game(g: DiGraph, k: int, monotone: bool = True) -> tuple[bool, DpwPlay | None, int]:
    """Can ``k`` cops clear ``g`` against an invisible robber?  Returns a clearing play."""
    if g.n == 0:
        return True, DpwPlay(g, []), 0
    succ, _ = _arrays(g)
    full = np.int64(g.full)
    if monotone:
        if g.n > MONOTONE_LIMIT:
            raise InvalidInput(f"monotone search supports at most {MONOTONE_LIMIT} vertices, got {g.n}")
        solved = _Solved.build(K.explore_dpw_monotone(succ, g.n, k, full))
    else:
        if g.n > GENERAL_LIMIT:
            raise InvalidInput(f"general search supports at most {GENERAL_LIMIT} vertices, got {g.n}")
        solved = _Solved.build(K.explore_dpw_general(succ, g.n, _cop_sets(g.n, k), full))
    if not solved.won[0]:
        return False, None, len(solved.states)
    placements = []
    i = 0
    while True:
        o = solved.choice[i]
        placements.append(int(solved.opt_move[o]))
        if solved.succ_ptr[o] == solved.succ_ptr[o + 1]:
            break
        i = solved.succ_idx[solved.succ_ptr[o]]
    return True, DpwPlay(g, placements), len(solved.states)


def directed_path_width(g: DiGraph, monotone: bool = True) -> WidthReport:
    for k in range(0, g.n + 1):
        ok, play, _ = solve_dpw_game(g, k, monotone)
        if ok:
            rep = WidthReport(DPW, max(k - 1, 0), k, None, None, monotone)
            rep.extra["play"] = play
            return rep
    raise AssertionError("n cops always clear a graph")


# -- replay against an exhaustive robber -------------------------------------------

@dataclass
class ReplayResult:
    captured: bool
    monotone: bool
    max_cops: int
    plays_checked: int
    failure: list[SearchConfig] | None = None


def replay(strategy: CopStrategy, r: int | None = None, max_positions: int = 200_000) -> ReplayResult:
    """Play ``strategy`` against every robber behaviour (robbers on concrete vertices).

    A robber revisiting a position on the current line of play proves an
    infinite play, i.e. an escape.
    """
    g = strategy.graph
    r = strategy.r if r is None else r
    ent = strategy.kind == ENT
    done: set[tuple[int, int]] = set()
    on_path: list[tuple[int, int]] = []
    on_path_set: set[tuple[int, int]] = set()
    result = ReplayResult(True, True, 0, 0)

    def robber_choices(cops: int, new: int, robbers: int) -> list[int]:
        if ent:
            (v,) = bits(robbers)
            return [1 << w for w in bits(g.succ[v] & ~new)]
        region = reach(g, robbers, cops & new) & ~new
        out = []
        verts = list(bits(region))
        for size in range(1, min(r, len(verts)) + 1):
            for combo in itertools.combinations(verts, size):
                out.append(sum(1 << v for v in combo))
        return out

    def visit(cops: int, robbers: int) -> bool:
        state = (cops, robbers)
        if state in done:
            return True
        if state in on_path_set or len(done) > max_positions:
            result.failure = [SearchConfig(frozenset(bits(u)), frozenset(bits(x))) for u, x in on_path + [state]]
            return False
        on_path.append(state)
        on_path_set.add(state)
        new = strategy.announce(cops, robbers)
        result.max_cops = max(result.max_cops, new.bit_count())
        if new.bit_count() > strategy.k:
            result.failure = [SearchConfig(frozenset(bits(cops)), frozenset(bits(robbers)), frozenset(bits(new)))]
            return False
        if not ent and reach(g, robbers, cops & new) & cops & ~new:
            result.monotone = False
        ok = True
        choices = robber_choices(cops, new, robbers)
        if not choices:
            result.plays_checked += 1
        for nxt in choices:
            if not visit(new, nxt):
                ok = False
                break
        on_path.pop()
        on_path_set.discard(state)
        if ok:
            done.add(state)
        return ok

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    starts = [1 << v for v in range(g.n)] if ent or r == 1 else \
        [sum(1 << v for v in c) for size in range(1, min(r, g.n) + 1)
         for c in itertools.combinations(range(g.n), size)]
    for start in starts:
        if not visit(0, start):
            result.captured = False
            break
    return result


__all__ = [
    "SearchConfig", "CopStrategy", "WidthReport", "GameOutcome", "DpwPlay", "ReplayResult",
    "front", "solve_dag_width_game", "dag_width", "nmdw", "tree_width", "multi_robber_width",
    "entanglement", "solve_entanglement_game", "directed_path_width", "solve_dpw_game", "replay",
]
