"""Cop-strategy transformations: active normalisation and lifts to the powerset graph."""
from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .game_model import ImperfectGame, imperfection_radius
from .graph_core import DiGraph, InvalidInput, bits, reach, to_mask
from .powerset import PowersetGame, powerset_construct
from .search_games import CopStrategy, DpwPlay, ReplayResult, SearchConfig, replay
from .search_games import front as _front


def front(g: DiGraph, v: int, blocked: int | Iterable[int]) -> int:
    """Members of ``blocked`` reachable from ``v`` along paths whose interior avoids it."""
    mask = blocked if isinstance(blocked, int) else to_mask(blocked)
    if mask >> v & 1:
        raise InvalidInput(f"vertex {v} lies in the blocking set")
    return _front(g, v, mask)


# -- active normalisation ------------------------------------------------------------

def normalize_active(g: DiGraph, f: CopStrategy, check: bool = True) -> CopStrategy:
    """Skip every move of ``f`` that only touches cops behind the front.

    From position ``(U, v)`` the moves of ``f`` are iterated with the robber
    standing still until one of them puts a new cop where the robber can go;
    the answer keeps the front and adds exactly those reachable new cops.
    """
    if g.n != f.graph.n:
        raise InvalidInput("strategy belongs to a different graph")
    if check:
        res = replay(f)
        if not res.captured or not res.monotone:
            witness = res.failure or []
            raise InvalidInput(f"strategy is not a monotone winning strategy; witness {witness}")
    limit = 1 << min(g.n + 1, 20)

    def announce(cops: int, robbers: int) -> int:
        if robbers.bit_count() != 1:
            raise InvalidInput("active normalisation is defined for a single robber")
        v = robbers.bit_length() - 1
        territory = reach(g, robbers, cops)
        if not territory:
            return cops
        current = cops
        for _ in range(limit):
            nxt = f.announce(current, robbers)
            region = reach(g, robbers, current)
            placed = nxt & ~current & region
            if placed:
                return front(g, v, cops) | placed
            if front(g, v, nxt) != front(g, v, current):
                raise InvalidInput(f"strategy changes the front without progress at "
                                   f"cops={sorted(bits(current))} robber={v}")
            if nxt == current:
                break
            current = nxt
        raise InvalidInput(f"strategy never approaches the robber at cops={sorted(bits(cops))} robber={v}")

    return CopStrategy(g, f.kind, f.k, True, f.r, announce=announce)


def is_active_move(g: DiGraph, cops: int, v: int, new: int) -> bool:
    placed = new & ~cops
    return bool(placed) and placed & ~reach(g, 1 << v, cops) == 0


# -- non-monotone DAG-width lift -------------------------------------------------------

@dataclass(frozen=True)
class LiftState:
    """One position of a lifted play.

    ``cops`` is the cop set on the powerset graph, ``robber`` the robber's
    knowledge set, and ``tree`` the source branches: one ``(v, C^v)`` per member
    ``v`` of the robber's set, ``C^v`` being the cops of ``f`` on that branch.
    """

    cops: int
    robber: int
    tree: tuple[tuple[int, int], ...]


@dataclass
class LiftedDwStrategy:
    pg: PowersetGame
    f: CopStrategy
    k: int
    r: int
    graph: DiGraph = field(init=False)

    def __post_init__(self):
        self.graph = self.pg.game.graph
        self._member_of = [[] for _ in range(self.f.graph.n)]
        for i, m in enumerate(self.pg.members):
            for v in m:
                self._member_of[v].append(i)

    @property
    def budget(self) -> int:
        return self.k * self.r * 2 ** (self.r - 1)

    def start(self, robber: int) -> LiftState:
        return LiftState(0, robber, tuple((v, 0) for v in self.pg.members[robber]))

    def branch_moves(self, state: LiftState) -> dict[int, int]:
        return {v: self.f.announce(c, 1 << v) for v, c in state.tree}

    def announce(self, state: LiftState) -> tuple[int, dict[int, int]]:
        """New powerset cop set: every knowledge set meeting some branch's next cops."""
        moves = self.branch_moves(state)
        union = 0
        for c in moves.values():
            union |= c
        out = 0
        for u in bits(union):
            for i in self._member_of[u]:
                out |= 1 << i
        return out, moves

    def _path(self, src: int, dst: int, blocked: int) -> list[int]:
        g = self.graph
        parent = {src: src}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            if x == dst:
                break
            for y in bits(g.succ[x] & ~blocked):
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        if dst not in parent:
            raise InvalidInput(f"knowledge set {dst} is not reachable from {src}")
        path = [dst]
        while path[-1] != src:
            path.append(parent[path[-1]])
        return path[::-1]

    def _lift_path(self, path: list[int]) -> dict[int, int]:
        """Root in ``path[0]`` of every member of ``path[-1]`` (least root first)."""
        pg, src = self.pg, self.pg.source
        roots = {w: w for w in pg.members[path[-1]]}
        for j in range(len(path) - 1, 0, -1):
            x, y = path[j - 1], path[j]
            classes = [cls for (s, _, d), cls in pg.source_action.items() if s == x and d == y]
            step = {}
            for w in pg.members[y]:
                for u in pg.members[x]:
                    if any(d == w and any(a in c for c in classes) for a, d in src.out_edges(u)):
                        step[w] = u
                        break
                else:
                    raise RuntimeError(f"member {w} of {y} has no predecessor in {x}")
            roots = {w: step[cur] for w, cur in roots.items()}
        return roots

    def robber_move(self, state: LiftState, new_cops: int, moves: dict[int, int], dst: int) -> LiftState:
        blocked = state.cops & new_cops
        assert not new_cops >> dst & 1, "robber cannot stop on a cop"
        path = self._path(state.robber, dst, blocked)
        roots = self._lift_path(path)
        tree = tuple(sorted((w, moves[u]) for w, u in roots.items()))
        return LiftState(new_cops, dst, tree)

    def robber_options(self, state: LiftState, new_cops: int) -> list[int]:
        region = reach(self.graph, 1 << state.robber, state.cops & new_cops) & ~new_cops
        return list(bits(region))

    def play(self, robber_moves: list[int]) -> list[tuple[LiftState, int]]:
        """Follow a given robber line; returns each state with the cops announced there."""
        state = self.start(robber_moves[0])
        out = []
        for dst in robber_moves[1:]:
            new, moves = self.announce(state)
            out.append((state, new))
            if dst not in self.robber_options(state, new):
                raise InvalidInput(f"robber cannot move to {dst}")
            state = self.robber_move(state, new, moves, dst)
        new, _ = self.announce(state)
        out.append((state, new))
        return out


def replay_lifted(strat: LiftedDwStrategy, max_positions: int = 500_000) -> ReplayResult:
    """Exhaustive robber against the lifted strategy; a repeated line position is an escape."""
    done: set[LiftState] = set()
    on_path: list[LiftState] = []
    on_set: set[LiftState] = set()
    result = ReplayResult(True, True, 0, 0)

    def visit(state: LiftState) -> bool:
        if state in done:
            return True
        if state in on_set or len(done) > max_positions:
            result.failure = [SearchConfig(frozenset(bits(s.cops)), frozenset([s.robber]))
                              for s in on_path + [state]]
            return False
        on_path.append(state)
        on_set.add(state)
        new, moves = strat.announce(state)
        result.max_cops = max(result.max_cops, new.bit_count())
        if reach(strat.graph, 1 << state.robber, state.cops & new) & state.cops & ~new:
            result.monotone = False
        options = strat.robber_options(state, new)
        if not options:
            result.plays_checked += 1
        ok = all(visit(strat.robber_move(state, new, moves, d)) for d in options)
        on_path.pop()
        on_set.discard(state)
        if ok:
            done.add(state)
        return ok

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    for v in range(strat.graph.n):
        if not visit(strat.start(v)):
            result.captured = False
            break
    return result


def lift_dw_nonmonotone(game: ImperfectGame, f: CopStrategy, k: int | None = None,
                        r: int | None = None, verify: bool = True,
                        pg: PowersetGame | None = None) -> LiftedDwStrategy:
    """Translate a winning cop strategy on the game graph to the powerset graph.

    Each member of the robber's knowledge set carries its own branch of ``f``;
    the cops occupy every knowledge set that meets one of the branch cop sets.
    """
    pg = pg or powerset_construct(game)
    if f.graph.n != pg.source.n:
        raise InvalidInput("strategy graph does not match the game")
    strat = LiftedDwStrategy(pg, f, f.k if k is None else k,
                             imperfection_radius(pg.source).r if r is None else r)
    if verify:
        res = replay_lifted(strat)
        if not res.captured:
            raise RuntimeError(f"lifted strategy lets the robber escape: {res.failure}")
        if res.max_cops > strat.budget:
            raise RuntimeError(f"lifted strategy uses {res.max_cops} cops, above {strat.budget}")
    return strat


# -- directed path-width lift -------------------------------------------------------------

def lift_dpw(game: ImperfectGame, play: DpwPlay, r: int | None = None,
             pg: PowersetGame | None = None) -> DpwPlay:
    """Occupy every knowledge set that meets the source cops, step by step."""
    pg = pg or powerset_construct(game)
    if not play.is_monotone() or not play.clears():
        raise InvalidInput("input play is not a monotone clearing play")
    member_of: list[int] = [0] * pg.source.n
    for i, m in enumerate(pg.members):
        for v in m:
            member_of[v] |= 1 << i
    placements = []
    for u in play.placements:
        mask = 0
        for v in bits(u):
            mask |= member_of[v]
        placements.append(mask)
    return DpwPlay(pg.game.graph, placements)


__all__ = [
    "front", "normalize_active", "is_active_move", "LiftState", "LiftedDwStrategy",
    "replay_lifted", "lift_dw_nonmonotone", "lift_dpw",
]
