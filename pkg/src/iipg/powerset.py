"""Knowledge-set construction turning an imperfect-information game into a perfect one."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .game_model import PARITY, REACH, SAFE, SEQ, ImperfectGame, WinningCondition
from .graph_core import InvalidInput
from .parity_solver import reduce_sequence_forcing


@dataclass(frozen=True, eq=False)
class PowersetGame:
    """``game`` has singleton classes; its position ``i`` stands for ``members[i]``.

    Edges carry the least action of the class that produced them, so a
    Player-0 position may have several successors under one action; the
    solvers let Player 1 resolve that choice.
    """

    game: ImperfectGame
    members: tuple[tuple[int, ...], ...]
    source_action: dict[tuple[int, int, int], frozenset[int]]
    source: ImperfectGame

    @property
    def n(self) -> int:
        return self.game.n

    def index(self, knowledge: Iterable[int]) -> int:
        table = self.__dict__.get("_index")
        if table is None:
            table = {m: i for i, m in enumerate(self.members)}
            object.__setattr__(self, "_index", table)
        return table[tuple(sorted(knowledge))]


def post(game: ImperfectGame, states: Iterable[int], actions: Iterable[int]) -> frozenset[int]:
    """All ``b``-successors of members of ``states`` for ``b`` in ``actions``."""
    acts = set(actions)
    return frozenset(d for s in states for a, d in game.out_edges(s) if a in acts)


def powerset_construct(game: ImperfectGame) -> PowersetGame:
    if game.condition.kind == SEQ:
        game = reduce_sequence_forcing(game)
    if game.class_of(game.initial) != [game.initial]:
        raise InvalidInput(f"initial position {game.initial} is not alone in its class")
    act_classes = {a: frozenset(c) for c in game.action_classes() for a in c}
    start = (game.initial,)
    ids = {start: 0}
    order = [start]
    edges: list[tuple[int, int, int]] = []
    source_action: dict[tuple[int, int, int], frozenset[int]] = {}
    queue = deque([start])
    while queue:
        knowledge = queue.popleft()
        here = ids[knowledge]
        if len({game.owner[v] for v in knowledge}) > 1 or len({game.color[v] for v in knowledge}) > 1:
            raise InvalidInput(f"knowledge set {list(knowledge)} mixes owners or colours")
        seen_classes = []
        for v in knowledge:
            for a, _ in game.out_edges(v):
                if act_classes[a] not in seen_classes:
                    seen_classes.append(act_classes[a])
        for cls in sorted(seen_classes, key=min):
            rep = min(cls)
            parts: dict[int, list[int]] = {}
            for d in sorted(post(game, knowledge, cls)):
                parts.setdefault(game.pos_class[d], []).append(d)
            for part in sorted(parts.values()):
                nxt = tuple(part)
                if nxt not in ids:
                    ids[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                edge = (here, rep, ids[nxt])
                edges.append(edge)
                source_action[edge] = cls
    cond = game.condition
    if cond.kind == PARITY:
        new_cond = WinningCondition.parity()
    elif cond.kind == REACH:
        new_cond = WinningCondition.reach(i for i, m in enumerate(order) if set(m) <= cond.targets)
    elif cond.kind == SAFE:
        # a knowledge set is dangerous as soon as it may contain a bad position
        new_cond = WinningCondition.safe(i for i, m in enumerate(order) if set(m) & cond.targets)
    else:
        raise InvalidInput(f"unsupported condition {cond.kind}")
    reps = sorted({a for _, a, _ in edges})
    pg = ImperfectGame(
        n=len(order),
        owner=tuple(game.owner[m[0]] for m in order),
        color=tuple(game.color[m[0]] for m in order),
        pos_class=tuple(range(len(order))),
        act_class={a: a for a in reps},
        edges=tuple(edges), initial=0, condition=new_cond)
    return PowersetGame(pg, tuple(order), source_action, game)


def lift_history(pg: PowersetGame, positions: Sequence[int], actions: Sequence[int],
                 last: int) -> tuple[list[int], list[int]]:
    """Source history ``u_0 a'_1 u_1 ... u_n`` through the knowledge sets of a powerset history.

    Walks backwards from ``last``, each time choosing the least predecessor
    (then least action) that the construction guarantees to exist.
    """
    if len(actions) != len(positions) - 1:
        raise InvalidInput("history needs exactly one action per step")
    src = pg.source
    if last not in pg.members[positions[-1]]:
        raise InvalidInput(f"{last} is not a member of the final knowledge set")
    us = [last]
    acts: list[int] = []
    for i in range(len(actions), 0, -1):
        edge = (positions[i - 1], actions[i - 1], positions[i])
        if edge not in pg.source_action:
            raise InvalidInput(f"step {i} ({edge}) is not an edge of the powerset game")
        cls = pg.source_action[edge]
        target = us[-1]
        found = None
        for u in pg.members[positions[i - 1]]:
            for a, d in src.out_edges(u):
                if d == target and a in cls:
                    found = (u, a)
                    break
            if found:
                break
        if found is None:
            raise RuntimeError(f"no source predecessor for {target} at step {i}")
        us.append(found[0])
        acts.append(found[1])
    us.reverse()
    acts.reverse()
    return us, acts
