"""Perfect-information solvers: attractors, reachability/safety, Zielonka, sequence forcing.

Games are first compiled into an ``Arena``.  A Player-0 position whose
action has several successors (which happens in powerset games) gets an
intermediate Player-1 node, so Player 1 resolves that choice.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .game_model import PARITY, REACH, SAFE, SEQ, ImperfectGame, WinningCondition
from .graph_core import InvalidInput


@dataclass
class Arena:
    owner: list[int]
    color: list[int]
    succ: list[list[int]]
    pred: list[list[int]] = field(default_factory=list)
    # node -> (position, action) for intermediate nodes; positions map to themselves
    origin: list[tuple[int, int | None]] = field(default_factory=list)
    n_positions: int = 0

    def __post_init__(self) -> None:
        if not self.pred:
            self.pred = [[] for _ in self.succ]
            for v, ws in enumerate(self.succ):
                for w in ws:
                    self.pred[w].append(v)
        if not self.origin:
            self.origin = [(v, None) for v in range(len(self.succ))]
        if not self.n_positions:
            self.n_positions = len(self.succ)

    @property
    def n(self) -> int:
        return len(self.succ)


def build_arena(game: ImperfectGame) -> Arena:
    n = game.n
    owner, color = list(game.owner), list(game.color)
    succ: list[list[int]] = [[] for _ in range(n)]
    origin: list[tuple[int, int | None]] = [(v, None) for v in range(n)]
    for v in range(n):
        by_act: dict[int, list[int]] = {}
        for a, d in game.out_edges(v):
            by_act.setdefault(a, []).append(d)
        if game.owner[v] == 1:
            succ[v] = sorted({d for ds in by_act.values() for d in ds})
            continue
        for a in sorted(by_act):
            ds = sorted(set(by_act[a]))
            if len(ds) == 1:
                if ds[0] not in succ[v]:
                    succ[v].append(ds[0])
                continue
            mid = len(succ)
            succ.append(ds)
            owner.append(1)
            color.append(game.color[v])
            origin.append((v, a))
            succ[v].append(mid)
    return Arena(owner, color, succ, origin=origin, n_positions=n)


def attractor(arena: Arena, target: set[int], player: int,
              within: set[int] | None = None) -> tuple[set[int], dict[int, int]]:
    """Least set inside ``within`` from which ``player`` forces a visit to ``target``.

    Opponent dead ends inside ``within`` are attracted as well (the stuck player loses).
    The strategy maps attracted ``player`` nodes to a successor one step closer.
    """
    nodes = set(range(arena.n)) if within is None else within
    attr = set(target) & nodes
    strat: dict[int, int] = {}
    count = {}
    for v in nodes:
        if v not in attr and arena.owner[v] != player:
            count[v] = sum(1 for w in arena.succ[v] if w in nodes)
    queue = deque(sorted(attr))
    for v in sorted(nodes - attr):
        if arena.owner[v] != player and count[v] == 0:
            attr.add(v)
            queue.append(v)
    while queue:
        w = queue.popleft()
        for v in arena.pred[w]:
            if v not in nodes or v in attr:
                continue
            if arena.owner[v] == player:
                attr.add(v)
                strat[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strat


def _stay(arena: Arena, v: int, region: set[int]) -> int | None:
    for w in arena.succ[v]:
        if w in region:
            return w
    return None


def _zielonka(arena: Arena, nodes: set[int]) -> tuple[set[int], set[int], dict[int, int], dict[int, int]]:
    if not nodes:
        return set(), set(), {}, {}
    p = min(arena.color[v] for v in nodes)
    i = p % 2
    top = {v for v in nodes if arena.color[v] == p}
    a_set, a_strat = attractor(arena, top, i, nodes)
    sub = _zielonka(arena, nodes - a_set)
    w_sub = [sub[0], sub[1]]
    s_sub = [sub[2], sub[3]]
    if not w_sub[1 - i]:
        win = [set(), set()]
        strat: list[dict[int, int]] = [{}, {}]
        win[i] = set(nodes)
        strat[i].update(s_sub[i])
        strat[i].update(a_strat)
        for v in top:
            if arena.owner[v] == i:
                strat[i][v] = _stay(arena, v, nodes)
        return win[0], win[1], strat[0], strat[1]
    b_set, b_strat = attractor(arena, w_sub[1 - i], 1 - i, nodes)
    rest = _zielonka(arena, nodes - b_set)
    w_rest = [rest[0], rest[1]]
    s_rest = [rest[2], rest[3]]
    win = [set(), set()]
    strat = [{}, {}]
    win[i] = w_rest[i]
    strat[i] = dict(s_rest[i])
    win[1 - i] = w_rest[1 - i] | b_set
    strat[1 - i].update(s_rest[1 - i])
    strat[1 - i].update(b_strat)
    strat[1 - i].update({v: w for v, w in s_sub[1 - i].items() if v in w_sub[1 - i]})
    return win[0], win[1], strat[0], strat[1]


def solve_arena_parity(arena: Arena) -> tuple[set[int], set[int], dict[int, int], dict[int, int]]:
    everything = set(range(arena.n))
    d1 = {v for v in everything if arena.owner[v] == 1 and not arena.succ[v]}
    d0 = {v for v in everything if arena.owner[v] == 0 and not arena.succ[v]}
    w0, s0 = attractor(arena, d1, 0)
    rest = everything - w0
    w1, s1 = attractor(arena, d0, 1, rest)
    core = rest - w1
    z0, z1, t0, t1 = _zielonka(arena, core)
    s0.update(t0)
    s1.update(t1)
    return w0 | z0, w1 | z1, s0, s1


def _fill_strategy(arena: Arena, region: set[int], strat: dict[int, int], player: int) -> None:
    for v in region:
        if arena.owner[v] == player and v not in strat:
            w = _stay(arena, v, region)
            if w is not None:
                strat[v] = w


@dataclass(frozen=True)
class SolveResult:
    win0: frozenset[int]
    win1: frozenset[int]
    strat0: dict[int, tuple[int, int | None]]
    strat1: dict[int, tuple[int, int | None]]
    # Player 1's pick when a Player-0 action has several successors: (position, action) -> dst
    resolve1: dict[tuple[int, int], int] = field(default_factory=dict)

    def winner(self, v: int) -> int:
        return 0 if v in self.win0 else 1


def _project(game: ImperfectGame, arena: Arena, w0: set[int], w1: set[int],
             s0: dict[int, int], s1: dict[int, int]) -> SolveResult:
    n = game.n
    strat: list[dict[int, tuple[int, int | None]]] = [{}, {}]
    for player, s in ((0, s0), (1, s1)):
        for v, w in s.items():
            if v >= n or w is None:
                continue
            if w >= n:
                strat[player][v] = (arena.origin[w][1], None)
            else:
                strat[player][v] = (_direct_action(game, v, w), w)
    resolve1 = {arena.origin[v]: w for v, w in s1.items() if v >= n and w is not None}
    return SolveResult(frozenset(x for x in w0 if x < n), frozenset(x for x in w1 if x < n),
                       strat[0], strat[1], resolve1)


def _direct_action(game: ImperfectGame, v: int, w: int) -> int:
    """Least action leading from ``v`` to ``w`` and nowhere else (or any, for Player 1)."""
    dsts: dict[int, set[int]] = {}
    for a, d in game.out_edges(v):
        dsts.setdefault(a, set()).add(d)
    only = [a for a, ds in dsts.items() if ds == {w}]
    return min(only) if only else min(a for a, ds in dsts.items() if w in ds)


def _require_perfect(game: ImperfectGame) -> None:
    if not game.is_perfect():
        raise InvalidInput("game has imperfect information; build the powerset game first")


def solve_parity(game: ImperfectGame) -> SolveResult:
    _require_perfect(game)
    arena = build_arena(game)
    w0, w1, s0, s1 = solve_arena_parity(arena)
    _fill_strategy(arena, w0, s0, 0)
    _fill_strategy(arena, w1, s1, 1)
    return _project(game, arena, w0, w1, s0, s1)


def solve_arena_reach(arena: Arena, target: set[int]) -> tuple[set[int], set[int], dict[int, int], dict[int, int]]:
    d1 = {v for v in range(arena.n) if arena.owner[v] == 1 and not arena.succ[v]}
    w0, s0 = attractor(arena, set(target) | d1, 0)
    w1 = set(range(arena.n)) - w0
    s1: dict[int, int] = {}
    _fill_strategy(arena, w1, s1, 1)
    return w0, w1, s0, s1


def solve_reachability(game: ImperfectGame, target=None) -> SolveResult:
    _require_perfect(game)
    target = game.condition.targets if target is None else target
    arena = build_arena(game)
    w0, w1, s0, s1 = solve_arena_reach(arena, set(target))
    _fill_strategy(arena, w0, s0, 0)
    return _project(game, arena, w0, w1, s0, s1)


def solve_safety(game: ImperfectGame, bad=None) -> SolveResult:
    _require_perfect(game)
    bad = game.condition.targets if bad is None else bad
    arena = build_arena(game)
    d0 = {v for v in range(arena.n) if arena.owner[v] == 0 and not arena.succ[v]}
    w1, s1 = attractor(arena, set(bad) | d0, 1)
    w0 = set(range(arena.n)) - w1
    s0: dict[int, int] = {}
    _fill_strategy(arena, w0, s0, 0)
    _fill_strategy(arena, w1, s1, 1)
    return _project(game, arena, w0, w1, s0, s1)


def reduce_sequence_forcing(game: ImperfectGame) -> ImperfectGame:
    """Product with a window of the last ``k`` colours; target = windows in ``S``."""
    cond = game.condition
    if cond.kind != SEQ:
        raise InvalidInput("reduce_sequence_forcing needs a 'seq' condition")
    k = cond.k
    wanted = set(cond.seqs)

    def step(window: tuple[int, ...], c: int) -> tuple[int, ...]:
        return (window + (c,))[-k:] if k else ()

    start = (game.initial, step((), game.color[game.initial]))
    ids = {start: 0}
    order = [start]
    edges = []
    queue = deque([start])
    while queue:
        state = queue.popleft()
        v, window = state
        for a, d in game.out_edges(v):
            nxt = (d, step(window, game.color[d]))
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            edges.append((ids[state], a, ids[nxt]))
    cls_ids: dict[tuple, int] = {}
    pos_class = []
    for v, window in order:
        key = (game.pos_class[v], window)
        pos_class.append(cls_ids.setdefault(key, len(cls_ids)))
    targets = [i for i, (_, w) in enumerate(order) if len(w) == k and w in wanted]
    return ImperfectGame(
        n=len(order), owner=tuple(game.owner[v] for v, _ in order),
        color=tuple(game.color[v] for v, _ in order), pos_class=tuple(pos_class),
        act_class=dict(game.act_class), edges=tuple(edges), initial=0,
        condition=WinningCondition.reach(targets))


def solve(game: ImperfectGame) -> SolveResult:
    """Dispatch on the winning condition of a perfect-information game."""
    kind = game.condition.kind
    if kind == PARITY:
        return solve_parity(game)
    if kind == REACH:
        return solve_reachability(game)
    if kind == SAFE:
        return solve_safety(game)
    if kind == SEQ:
        raise InvalidInput("reduce sequence-forcing games before solving")
    raise InvalidInput(f"unsupported condition {kind}")


def verify_strategy(game: ImperfectGame, result: SolveResult, player: int) -> bool:
    """Replay ``strat_player`` from its region against every opponent choice.

    Explores the one-player graph that remains once ``player`` is fixed and
    checks that the opponent reaches no win: no dead end of ``player``, no
    cycle whose least colour has the opponent's parity (parity games), and
    no escape from/into the relevant set for reach/safety games.
    """
    arena = build_arena(game)
    region = result.win0 if player == 0 else result.win1
    strat = result.strat0 if player == 0 else result.strat1
    n = game.n

    def moves(v: int) -> list[int]:
        if arena.owner[v] == player:
            if v < n:
                if not arena.succ[v]:
                    return []
                act, dst = strat[v]
                if dst is not None:
                    return [dst]
                return [w for w in arena.succ[v] if w >= n and arena.origin[w][1] == act]
            choice = result.resolve1.get(arena.origin[v]) if player == 1 else None
            return [choice] if choice is not None else list(arena.succ[v])
        return list(arena.succ[v])

    reach_nodes = set()
    stack = list(region)
    if any(arena.owner[v] == player and arena.succ[v] and v not in strat
           for v in _closure(region, lambda v: moves(v) if v in strat or arena.owner[v] != player or v >= n
                             or not arena.succ[v] else [])):
        return False
    while stack:
        v = stack.pop()
        if v in reach_nodes:
            continue
        reach_nodes.add(v)
        stack.extend(moves(v))
    cond = game.condition.kind
    targets = game.condition.targets
    for v in reach_nodes:
        if not arena.succ[v] and arena.owner[v] == player:
            if cond == REACH and player == 0 and v in targets:
                continue
            return False
    if cond == SAFE:
        return not (player == 0 and reach_nodes & set(targets))
    if cond == REACH:
        if player == 1:
            return not reach_nodes & set(targets)
        # Player 0: the restricted graph outside the target must be acyclic
        inner = {v for v in reach_nodes if v not in targets}
        return _acyclic(inner, lambda v: [w for w in moves(v) if w in inner])
    # parity: no reachable cycle whose minimum colour has the opponent's parity
    for c in sorted({arena.color[v] for v in reach_nodes}):
        if c % 2 == player:
            continue
        sub = {v for v in reach_nodes if arena.color[v] >= c}
        seeds = {v for v in sub if arena.color[v] == c}
        if _cycle_through(seeds, sub, lambda v: [w for w in moves(v) if w in sub]):
            return False
    return True


def _closure(start, nxt) -> set[int]:
    seen, stack = set(), list(start)
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(nxt(v))
    return seen


def _acyclic(nodes: set[int], nxt) -> bool:
    state: dict[int, int] = {}
    for root in nodes:
        if root in state:
            continue
        stack = [(root, iter(nxt(root)))]
        state[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if state.get(w) == 1:
                    return False
                if w not in state:
                    state[w] = 1
                    stack.append((w, iter(nxt(w))))
                    break
            else:
                state[v] = 2
                stack.pop()
    return True


def _cycle_through(seeds: set[int], nodes: set[int], nxt) -> bool:
    for s in seeds:
        seen = set()
        stack = list(nxt(s))
        while stack:
            v = stack.pop()
            if v == s:
                return True
            if v in seen:
                continue
            seen.add(v)
            stack.extend(nxt(v))
    return False
