"""Game arenas where Player 0 observes positions and actions only up to equivalence."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph_core import DiGraph, InvalidInput

PARITY, REACH, SAFE, SEQ = "parity", "reach", "safe", "seq"


@dataclass(frozen=True)
class WinningCondition:
    kind: str = PARITY
    targets: frozenset[int] = frozenset()
    k: int = 0
    seqs: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (PARITY, REACH, SAFE, SEQ):
            raise InvalidInput(f"unknown winning condition {self.kind!r}")
        if self.kind == SEQ:
            bad = [s for s in self.seqs if len(s) != self.k]
            if bad:
                raise InvalidInput(f"sequence {bad[0]} does not have length k={self.k}")

    @classmethod
    def parity(cls) -> "WinningCondition":
        return cls(PARITY)

    @classmethod
    def reach(cls, targets: Iterable[int]) -> "WinningCondition":
        return cls(REACH, frozenset(targets))

    @classmethod
    def safe(cls, bad: Iterable[int]) -> "WinningCondition":
        return cls(SAFE, frozenset(bad))

    @classmethod
    def sequence_forcing(cls, k: int, seqs: Iterable[Sequence[int]]) -> "WinningCondition":
        return cls(SEQ, k=k, seqs=tuple(sorted({tuple(s) for s in seqs})))


@dataclass(frozen=True)
class Violation:
    condition: str
    witnesses: tuple
    message: str

    def __str__(self) -> str:
        return f"{self.condition}: {self.message}"


@dataclass(frozen=True, eq=False)
class ImperfectGame:
    """Positions ``0..n-1``; edges are ``(src, action, dst)`` triples.

    ``pos_class[v]`` and ``act_class[a]`` are labels of the observation classes.
    """

    n: int
    owner: tuple[int, ...]
    color: tuple[int, ...]
    pos_class: tuple[int, ...]
    act_class: Mapping[int, int]
    edges: tuple[tuple[int, int, int], ...]
    initial: int
    condition: WinningCondition = field(default_factory=WinningCondition.parity)

    def __post_init__(self) -> None:
        n = self.n
        for name in ("owner", "color", "pos_class"):
            if len(getattr(self, name)) != n:
                raise InvalidInput(f"{name} has length {len(getattr(self, name))}, expected {n}")
        if not 0 <= self.initial < n:
            raise InvalidInput(f"initial position {self.initial} outside 0..{n - 1}")
        for s, a, d in self.edges:
            if not (0 <= s < n and 0 <= d < n):
                raise InvalidInput(f"edge ({s},{a},{d}) has an unknown endpoint")
            if a not in self.act_class:
                raise InvalidInput(f"edge ({s},{a},{d}) uses undeclared action {a}")
        for t in self.condition.targets:
            if not 0 <= t < n:
                raise InvalidInput(f"condition refers to unknown position {t}")
        object.__setattr__(self, "edges", tuple(sorted(set(self.edges))))
        object.__setattr__(self, "act_class", dict(sorted(self.act_class.items())))

    # -- derived views -------------------------------------------------------

    @property
    def graph(self) -> DiGraph:
        g = self.__dict__.get("_graph")
        if g is None:
            g = DiGraph.from_edges(self.n, {(s, d) for s, _, d in self.edges})
            object.__setattr__(self, "_graph", g)
        return g

    def out_edges(self, v: int) -> list[tuple[int, int]]:
        """``(action, dst)`` pairs leaving ``v``."""
        table = self.__dict__.get("_out")
        if table is None:
            table = [[] for _ in range(self.n)]
            for s, a, d in self.edges:
                table[s].append((a, d))
            object.__setattr__(self, "_out", table)
        return table[v]

    def act(self, v: int) -> frozenset[int]:
        return frozenset(a for a, _ in self.out_edges(v))

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = defaultdict(list)
        for v, c in enumerate(self.pos_class):
            groups[c].append(v)
        return [groups[c] for c in sorted(groups)]

    def class_of(self, v: int) -> list[int]:
        return [u for u in range(self.n) if self.pos_class[u] == self.pos_class[v]]

    def action_classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = defaultdict(list)
        for a, c in self.act_class.items():
            groups[c].append(a)
        return [sorted(groups[c]) for c in sorted(groups)]

    def action_class_of(self, a: int) -> frozenset[int]:
        c = self.act_class[a]
        return frozenset(b for b, d in self.act_class.items() if d == c)

    def is_perfect(self) -> bool:
        return len(set(self.pos_class)) == self.n and len(set(self.act_class.values())) == len(self.act_class)

    def replace(self, **changes) -> "ImperfectGame":
        fields = dict(n=self.n, owner=self.owner, color=self.color, pos_class=self.pos_class,
                      act_class=self.act_class, edges=self.edges, initial=self.initial,
                      condition=self.condition)
        fields.update(changes)
        return ImperfectGame(**fields)


def perfect_game(n: int, owner: Sequence[int], color: Sequence[int],
                 edges: Iterable[tuple[int, int]], initial: int = 0,
                 condition: WinningCondition | None = None) -> ImperfectGame:
    """Perfect-information game: one fresh action per edge, singleton classes."""
    es = sorted(set(edges))
    return ImperfectGame(
        n=n, owner=tuple(owner), color=tuple(color), pos_class=tuple(range(n)),
        act_class={i: i for i in range(len(es))},
        edges=tuple((s, i, d) for i, (s, d) in enumerate(es)),
        initial=initial, condition=condition or WinningCondition.parity())


@dataclass(frozen=True)
class ImperfectionRadius:
    r: int


def imperfection_radius(game: ImperfectGame) -> ImperfectionRadius:
    return ImperfectionRadius(max((len(c) for c in game.classes()), default=1))


def validate(game: ImperfectGame) -> list[Violation]:
    """Check determinism and the four observability conditions.

    Condition 2 is only enforced where Player 0 moves: Player 1 has perfect
    information, so equivalent actions at Player-1 positions are harmless.
    """
    out: list[Violation] = []
    n = game.n
    for v in range(n):
        by_action: dict[int, list[int]] = defaultdict(list)
        for a, d in game.out_edges(v):
            by_action[a].append(d)
        for a, ds in sorted(by_action.items()):
            if len(ds) > 1:
                out.append(Violation("determinism", (v, a, tuple(ds)),
                                     f"position {v} has {len(ds)} successors under action {a}"))
    for cls in game.classes():
        owners = {game.owner[v] for v in cls}
        if len(owners) > 1:
            out.append(Violation("condition-1", tuple(cls),
                                 f"equivalent positions {cls} have different owners"))
        colors = {game.color[v] for v in cls}
        if len(colors) > 1:
            out.append(Violation("condition-4", tuple(cls),
                                 f"equivalent positions {cls} have different colors"))
        p0 = [v for v in cls if game.owner[v] == 0]
        if len(p0) > 1:
            ref = game.act(p0[0])
            for v in p0[1:]:
                if game.act(v) != ref:
                    out.append(Violation("condition-3", (p0[0], v),
                                         f"equivalent Player-0 positions {p0[0]} and {v} offer different actions"))
    for v in range(n):
        if game.owner[v] != 0:
            continue
        acts = sorted(game.act(v))
        for i, a in enumerate(acts):
            for b in acts[i + 1:]:
                if game.act_class[a] == game.act_class[b]:
                    out.append(Violation("condition-2", (v, a, b),
                                         f"actions {a} and {b} at Player-0 position {v} are equivalent"))
    init_cls = game.class_of(game.initial)
    if len(init_cls) != 1:
        out.append(Violation("initial", tuple(init_cls),
                             f"initial class {init_cls} is not a singleton"))
    if game.condition.kind in (REACH, SAFE):
        t = game.condition.targets
        for cls in game.classes():
            hit = [v for v in cls if v in t]
            if hit and len(hit) != len(cls):
                out.append(Violation("observable-target", tuple(cls),
                                     f"target set splits class {cls}"))
    return out


# -- text format ---------------------------------------------------------------

def _parse_cond(tok: list[str], lineno: int) -> WinningCondition:
    kind = tok[1] if len(tok) > 1 else ""
    try:
        if kind == "parity" and len(tok) == 2:
            return WinningCondition.parity()
        if kind == "reach":
            return WinningCondition.reach(int(t) for t in tok[2:])
        if kind == "safe":
            return WinningCondition.safe(int(t) for t in tok[2:])
        if kind == "seq":
            parts = " ".join(tok[2:]).split(";")
            k = int(parts[0])
            seqs = [tuple(int(c) for c in p.split()) for p in parts[1:] if p.strip()]
            return WinningCondition.sequence_forcing(k, seqs)
    except ValueError as exc:
        if isinstance(exc, InvalidInput):
            raise InvalidInput(f"line {lineno}: {exc}") from None
        raise InvalidInput(f"line {lineno}: bad number in condition {' '.join(tok)!r}") from None
    raise InvalidInput(f"line {lineno}: unknown condition {' '.join(tok[1:])!r}")


def parse_game(text: str) -> ImperfectGame:
    n = None
    pos: dict[int, tuple[int, int, int]] = {}
    acts: dict[int, int] = {}
    raw_edges: list[tuple[int, int | None, int, int]] = []
    initial = None
    cond = None
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        try:
            if not header:
                if tok != ["iipg", "1"]:
                    raise InvalidInput(f"line {lineno}: expected header 'iipg 1', got {line!r}")
                header = True
            elif head == "positions" and len(tok) == 2 and n is None:
                n = int(tok[1])
            elif head == "pos" and len(tok) == 5:
                pid, own, col, cls = (int(t) for t in tok[1:])
                if pid in pos:
                    raise InvalidInput(f"line {lineno}: duplicate position id {pid}")
                if own not in (0, 1) or col < 0 or cls < 0:
                    raise InvalidInput(f"line {lineno}: bad owner/color/class in {line!r}")
                pos[pid] = (own, col, cls)
            elif head == "act" and len(tok) == 3:
                aid, cls = int(tok[1]), int(tok[2])
                if aid in acts:
                    raise InvalidInput(f"line {lineno}: duplicate action id {aid}")
                acts[aid] = cls
            elif head == "edge" and len(tok) in (3, 4):
                if len(tok) == 4:
                    raw_edges.append((int(tok[1]), int(tok[2]), int(tok[3]), lineno))
                else:
                    raw_edges.append((int(tok[1]), None, int(tok[2]), lineno))
            elif head == "init" and len(tok) == 2:
                initial = int(tok[1])
            elif head == "cond":
                cond = _parse_cond(tok, lineno)
            else:
                raise InvalidInput(f"line {lineno}: unexpected token {head!r}")
        except ValueError as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"line {lineno}: malformed number in {line!r}") from None
    if not header:
        raise InvalidInput("empty input: missing 'iipg 1' header")
    if n is None:
        raise InvalidInput("missing 'positions <N>' line")
    missing = [i for i in range(n) if i not in pos]
    extra = [i for i in pos if not 0 <= i < n]
    if extra:
        raise InvalidInput(f"position id {extra[0]} outside 0..{n - 1}")
    if missing:
        raise InvalidInput(f"position {missing[0]} declared by 'positions {n}' but not defined")
    if initial is None:
        raise InvalidInput("missing 'init <id>' line")
    if not 0 <= initial < n:
        raise InvalidInput(f"initial position {initial} is not a position id")
    declared = bool(acts)
    used = {a for _, a, _, _ in raw_edges if a is not None}
    next_action = max(used | set(acts), default=-1) + 1
    edges = []
    for s, a, d, lineno in raw_edges:
        for end in (s, d):
            if not 0 <= end < n:
                raise InvalidInput(f"line {lineno}: edge refers to unknown position {end}")
        if a is None:
            a = next_action
            next_action += 1
        if a not in acts:
            if declared:
                raise InvalidInput(f"line {lineno}: edge uses undeclared action {a}")
            # no act section: every action is its own class
            acts[a] = a
        edges.append((s, a, d))
    if cond is None:
        cond = WinningCondition.parity()
    for t in cond.targets:
        if not 0 <= t < n:
            raise InvalidInput(f"condition refers to unknown position {t}")
    pos_class = tuple(pos[i][2] for i in range(n))
    init_cls = [v for v in range(n) if pos_class[v] == pos_class[initial]]
    if len(init_cls) != 1:
        raise InvalidInput(f"initial position {initial} is not alone in its class {init_cls}")
    return ImperfectGame(
        n=n, owner=tuple(pos[i][0] for i in range(n)), color=tuple(pos[i][1] for i in range(n)),
        pos_class=pos_class, act_class=acts, edges=tuple(edges), initial=initial, condition=cond)


def serialize_game(game: ImperfectGame) -> str:
    lines = ["iipg 1", f"positions {game.n}"]
    for v in range(game.n):
        lines.append(f"pos {v} {game.owner[v]} {game.color[v]} {game.pos_class[v]}")
    for a, c in sorted(game.act_class.items()):
        lines.append(f"act {a} {c}")
    for s, a, d in sorted(game.edges):
        lines.append(f"edge {s} {a} {d}")
    lines.append(f"init {game.initial}")
    c = game.condition
    if c.kind == PARITY:
        lines.append("cond parity")
    elif c.kind in (REACH, SAFE):
        lines.append(" ".join(["cond", c.kind, *map(str, sorted(c.targets))]).rstrip())
    else:
        body = " ; ".join(" ".join(map(str, s)) for s in c.seqs)
        lines.append(f"cond seq {c.k}" + (f" ; {body}" if body else ""))
    return "\n".join(lines) + "\n"
