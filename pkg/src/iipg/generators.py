"""Deterministic constructors for the example families, plus seeded random games.

Id conventions: position 0 is always the initial position of a game;
grid-like families are numbered row-major, trees breadth-first.
Structural gadgets are parity games with every colour 1, so Player 1 wins
every infinite play.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .game_model import ImperfectGame, WinningCondition
from .graph_core import DiGraph, InvalidInput

DEFAULT_CAP = 5000


def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise InvalidInput(f"{what} would have {count} vertices, above the cap of {cap}")


def _gadget(n: int, pos_class: list[int], edges: list[tuple[int, int, int]],
            act_class: dict[int, int]) -> ImperfectGame:
    return ImperfectGame(n=n, owner=(1,) * n, color=(1,) * n, pos_class=tuple(pos_class),
                         act_class=act_class, edges=tuple(edges), initial=0,
                         condition=WinningCondition.parity())


def gen_cycles_gadget(n: int) -> ImperfectGame:
    """``n`` two-cycles with self-loops behind an initial position.

    Position ``1 + 2*(i-1) + j`` is vertex ``j`` of cycle ``i``.  Action ``i-1``
    enters cycle ``i`` (all entry actions are equivalent); action ``n+i-1``
    switches cycle ``i`` and loops everywhere else.
    """
    if n < 2 or n % 2:
        raise InvalidInput(f"cycles gadget needs an even n >= 2, got {n}")
    pid = lambda i, j: 1 + 2 * (i - 1) + j  # noqa: E731
    edges = []
    for i in range(1, n + 1):
        edges.append((0, i - 1, pid(i, 0)))
        for j in (0, 1):
            for m in range(1, n + 1):
                dst = pid(i, 1 - j) if m == i else pid(i, j)
                edges.append((pid(i, j), n + m - 1, dst))
    act_class = {i: 0 for i in range(n)}
    act_class.update({n + i: 1 + i for i in range(n)})
    return _gadget(2 * n + 1, [0] + [1] * (2 * n), edges, act_class)


def gen_paths_gadget(n: int) -> ImperfectGame:
    """Two undirected ``n``-paths with self-loops; the knowledge sets form an n x n grid.

    Position ``1 + p*n + j`` is vertex ``j`` of path ``p`` (p = 0, 1).  Actions
    ``0, 1`` enter the paths; ``2 + 2p`` steps right and ``3 + 2p`` steps left
    on path ``p`` and loop on the other path (and at the path ends).
    """
    if n < 2:
        raise InvalidInput(f"paths gadget needs n >= 2, got {n}")
    pid = lambda p, j: 1 + p * n + j  # noqa: E731
    edges = [(0, 0, pid(0, 0)), (0, 1, pid(1, 0))]
    for p in (0, 1):
        for j in range(n):
            for q in (0, 1):
                right = pid(p, min(j + 1, n - 1)) if q == p else pid(p, j)
                left = pid(p, max(j - 1, 0)) if q == p else pid(p, j)
                edges.append((pid(p, j), 2 + 2 * q, right))
                edges.append((pid(p, j), 3 + 2 * q, left))
    act_class = {0: 0, 1: 0, 2: 1, 3: 2, 4: 3, 5: 4}
    return _gadget(2 * n + 1, [0] + [1] * (2 * n), edges, act_class)


def gen_halfgrid(n: int) -> ImperfectGame:
    """``n`` undirected rows of length ``n``; ``(i,j) ~ (i+1,j)`` when ``i + j`` is odd.

    Row ``i`` and column ``j`` are 1-based; position ``1 + (i-1)*n + (j-1)``.
    Position 0 reaches every vertex and all actions are equivalent.
    """
    if n < 4 or n % 2:
        raise InvalidInput(f"half-grid needs an even n >= 4, got {n}")
    pid = lambda i, j: 1 + (i - 1) * n + (j - 1)  # noqa: E731
    pairs = [(0, pid(i, j)) for i in range(1, n + 1) for j in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n):
            pairs += [(pid(i, j), pid(i, j + 1)), (pid(i, j + 1), pid(i, j))]
    edges = [(s, a, d) for a, (s, d) in enumerate(pairs)]
    cls = list(range(n * n + 1))
    for i in range(1, n):
        for j in range(1, n + 1):
            if (i + j) % 2:
                cls[pid(i + 1, j)] = cls[pid(i, j)]
    return _gadget(n * n + 1, cls, edges, {a: 0 for a in range(len(edges))})


def _words(alphabet: list[str], max_len: int, prefix: str) -> list[str]:
    out = [prefix]
    frontier = [prefix]
    for _ in range(max_len - 1):
        frontier = [w + c for w in frontier for c in alphabet]
        out += frontier
    return out


def gen_double_tree(n: int) -> ImperfectGame:
    """Two binary trees of depth ``n`` joined by length-two paths.

    Ids: 0 is the initial position, then the first tree ``T1`` (words over
    ``0,1`` starting with ``0``, self-loops everywhere), the intermediate
    vertices (words over ``a,b``), then the second tree ``T2``, each breadth-first.
    ``u`` in ``T1`` is equivalent to its image in ``T2``.
    """
    if n < 2 or n % 2:
        raise InvalidInput(f"double tree needs an even n >= 2, got {n}")
    t1 = _words(["0", "1"], n, "0")
    mid = [w.translate(str.maketrans("01", "ab")) for w in t1]
    t2 = [w.translate(str.maketrans("01", "xy")) for w in t1]
    names = ["v0"] + t1 + mid + t2
    ids = {w: i for i, w in enumerate(names)}
    pairs = [(0, ids["0"])]
    for tree in (t1, t2):
        for w in tree:
            for c in ("01" if tree is t1 else "xy"):
                child = w + c
                if child in ids:
                    pairs += [(ids[w], ids[child]), (ids[child], ids[w])]
    for w, a, b in zip(t1, mid, t2):
        pairs += [(ids[w], ids[w]), (ids[w], ids[a]), (ids[a], ids[w]), (ids[a], ids[b])]
    edges = [(s, a, d) for a, (s, d) in enumerate(pairs)]
    cls = list(range(len(names)))
    for w, b in zip(t1, t2):
        cls[ids[b]] = cls[ids[w]]
    return _gadget(len(names), cls, edges, {a: a for a in range(len(edges))})


def gen_fig4() -> ImperfectGame:
    """Six positions: 0 -> 1, 0 -> 2, 1 -> 3, 2 <-> 4, 2 <-> 5, 4 -> 1; classes {1,2}, {3,4}."""
    pairs = [(0, 1), (0, 2), (1, 3), (2, 4), (4, 2), (2, 5), (5, 2), (4, 1)]
    edges = [(s, a, d) for a, (s, d) in enumerate(pairs)]
    return _gadget(6, [0, 1, 1, 2, 2, 3], edges, {a: 0 for a in range(len(edges))})


def _full_tree(branching: int, levels: int) -> tuple[int, list[tuple[int, int]]]:
    """Breadth-first ids of a full tree with ``levels`` levels; returns (size, parent edges)."""
    edges = []
    layer = [0]
    size = 1
    for _ in range(levels - 1):
        nxt = []
        for p in layer:
            for _ in range(branching):
                edges.append((p, size))
                nxt.append(size)
                size += 1
        layer = nxt
    return size, edges


def gen_lex_tree(k: int, r: int, cap: int = DEFAULT_CAP) -> DiGraph:
    """Lexicographic product of the full undirected tree (branching ceil(r/2)+2,
    r+1 levels) with the complete graph on ``k`` vertices; vertex ``t*k + c``."""
    if k < 1 or r < 1:
        raise InvalidInput(f"lex tree needs k >= 1 and r >= 1, got k={k}, r={r}")
    b = math.ceil(r / 2) + 2
    count = sum(b ** i for i in range(r + 1)) * k
    _check_cap(count, cap, "lex tree")
    size, tree = _full_tree(b, r + 1)
    out = []
    for t in range(size):
        for c, d in itertools.permutations(range(k), 2):
            out.append((t * k + c, t * k + d))
    for s, t in tree:
        for c in range(k):
            for d in range(k):
                out += [(s * k + c, t * k + d), (t * k + d, s * k + c)]
    return DiGraph.from_edges(size * k, out)


def gen_offhanded(n: int, cap: int = DEFAULT_CAP) -> DiGraph:
    """An undirected and a directed (child -> parent) tree of branching and depth n+1.

    Words of length <= n over letters 1..n+1, breadth-first; the undirected copy
    takes ids ``0..m-1`` and the directed copy ``m..2m-1``.  Cross edges go from
    every undirected vertex to its twin and from every directed child to the
    undirected twin of its parent.
    """
    if n < 1:
        raise InvalidInput(f"offhanded gadget needs n >= 1, got {n}")
    m = sum((n + 1) ** i for i in range(n + 1))
    _check_cap(2 * m, cap, "offhanded gadget")
    size, tree = _full_tree(n + 1, n + 1)
    out = []
    for parent, child in tree:
        out += [(parent, child), (child, parent)]
        out.append((m + child, m + parent))
        out.append((m + child, parent))
    out += [(v, m + v) for v in range(size)]
    return DiGraph.from_edges(2 * m, out)


@dataclass(frozen=True)
class RandomSpec:
    n: int = 8
    colors: int = 3
    r: int = 2
    max_out: int = 2
    acyclic: bool = False
    condition: str = "parity"
    seed: int = 0


def gen_random(spec: RandomSpec | None = None, **kw) -> ImperfectGame:
    """A valid random game; classes group positions of equal owner and colour.

    Equivalent Player-0 positions share their action ids; the ``j``-th action of
    every position lies in action class ``j``.
    """
    spec = spec or RandomSpec(**kw)
    if spec.n < 1 or spec.colors < 1 or spec.r < 1 or spec.max_out < 0:
        raise InvalidInput(f"infeasible random spec {spec}")
    if spec.condition not in ("parity", "reach", "safe"):
        raise InvalidInput(f"unknown condition {spec.condition!r}")
    rng = random.Random(spec.seed)
    n = spec.n
    owner = [rng.randrange(2) for _ in range(n)]
    color = [rng.randrange(spec.colors) for _ in range(n)]
    pos_class = [0] * n
    groups: dict[tuple[int, int], list[int]] = {}
    for v in range(1, n):
        groups.setdefault((owner[v], color[v]), []).append(v)
    next_class = 1
    classes = [[0]]
    for key in sorted(groups):
        members = groups[key]
        rng.shuffle(members)
        while members:
            size = rng.randint(1, spec.r)
            chunk, members = sorted(members[:size]), members[size:]
            for v in chunk:
                pos_class[v] = next_class
            classes.append(chunk)
            next_class += 1
    edges = []
    act_class: dict[int, int] = {}
    next_action = 0

    def targets(v: int) -> list[int]:
        return list(range(v + 1, n)) if spec.acyclic else list(range(n))

    for cls in classes:
        lo = 0 if spec.acyclic else 1
        if spec.acyclic and any(not targets(v) for v in cls):
            degree = 0
        else:
            degree = rng.randint(lo, spec.max_out)
        if owner[cls[0]] == 0:
            acts = list(range(next_action, next_action + degree))
            next_action += degree
            for j, a in enumerate(acts):
                act_class[a] = j
                for v in cls:
                    edges.append((v, a, rng.choice(targets(v))))
        else:
            for v in cls:
                d = degree if len(cls) == 1 else rng.randint(lo, spec.max_out)
                if spec.acyclic and not targets(v):
                    d = 0
                for j in range(d):
                    act_class[next_action] = j
                    edges.append((v, next_action, rng.choice(targets(v))))
                    next_action += 1
    if spec.r == 1:
        act_class = {a: a for a in act_class}
    cond = WinningCondition.parity()
    if spec.condition in ("reach", "safe"):
        chosen = [c for c in classes[1:] if rng.random() < 0.3]
        tset = sorted(v for c in chosen for v in c)
        cond = WinningCondition.reach(tset) if spec.condition == "reach" else WinningCondition.safe(tset)
    return ImperfectGame(n=n, owner=tuple(owner), color=tuple(color), pos_class=tuple(pos_class),
                         act_class=act_class, edges=tuple(edges), initial=0, condition=cond)


def gen_random_perfect(n: int, colors: int, seed: int, max_out: int = 2) -> ImperfectGame:
    """Random perfect-information parity game where every position has a move."""
    return gen_random(RandomSpec(n=n, colors=colors, r=1, max_out=max_out, seed=seed))


def gen_random_digraph(n: int, p: float, seed: int, loops: bool = False) -> DiGraph:
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(n)
             if (u != v or loops) and rng.random() < p]
    return DiGraph.from_edges(n, edges)


FAMILIES = {
    "cycles": gen_cycles_gadget,
    "paths": gen_paths_gadget,
    "halfgrid": gen_halfgrid,
    "doubletree": gen_double_tree,
    "fig4": gen_fig4,
    "lextree": gen_lex_tree,
    "offhanded": gen_offhanded,
}
