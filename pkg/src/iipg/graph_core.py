"""Directed graphs over dense vertex ids with bitmask vertex sets.

A vertex set is a Python int whose bit ``v`` is set iff ``v`` belongs to
the set.  All graph operations here are pure; ``DiGraph`` is immutable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class InvalidInput(ValueError):
    """Raised on malformed user input (bad ids, bad text, bad parameters)."""


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int] | int) -> int:
    if isinstance(vertices, int):
        return vertices
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def to_set(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


@dataclass(frozen=True)
class DiGraph:
    n: int
    succ: tuple[int, ...]
    pred: tuple[int, ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DiGraph":
        if n < 0:
            raise InvalidInput(f"negative vertex count {n}")
        succ = [0] * n
        pred = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInput(f"edge ({u},{v}) has endpoint outside 0..{n - 1}")
            succ[u] |= 1 << v
            pred[v] |= 1 << u
        return cls(n, tuple(succ), tuple(pred))

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.succ[u])]

    def num_edges(self) -> int:
        return sum(s.bit_count() for s in self.succ)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.succ[u] >> v & 1)

    def successors(self, v: int) -> list[int]:
        return list(bits(self.succ[v]))

    def out_mask(self, mask: int) -> int:
        """Union of successors of all vertices in ``mask``."""
        out = 0
        for v in bits(mask):
            out |= self.succ[v]
        return out

    def induced(self, keep: int) -> tuple["DiGraph", list[int]]:
        """Subgraph induced by ``keep``, relabelled densely; returns old ids too."""
        old = list(bits(keep))
        new_id = {v: i for i, v in enumerate(old)}
        edges = [(new_id[u], new_id[v]) for u in old for v in bits(self.succ[u] & keep)]
        return DiGraph.from_edges(len(old), edges), old

    def is_acyclic(self) -> bool:
        """True iff no directed cycle (self-loops count as cycles)."""
        indeg = [p.bit_count() for p in self.pred]
        stack = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for w in bits(self.succ[v]):
                indeg[w] -= 1
                if indeg[w] == 0:
                    stack.append(w)
        return seen == self.n


def _check_mask(g: DiGraph, mask: int, what: str) -> None:
    if mask < 0 or mask >> g.n:
        bad = [v for v in bits(mask >> g.n << g.n)] if mask >= 0 else ["negative"]
        raise InvalidInput(f"{what} contains vertex id(s) {bad} >= n={g.n}")


def reach(g: DiGraph, sources: Iterable[int] | int, blocked: Iterable[int] | int = 0) -> int:
    """Vertices reachable from ``sources \\ blocked`` along paths avoiding ``blocked``."""
    src, blk = to_mask(sources), to_mask(blocked)
    _check_mask(g, src, "sources")
    _check_mask(g, blk, "blocked")
    return _reach(g.succ, src, blk)


def _reach(adj: tuple[int, ...], src: int, blk: int) -> int:
    seen = src & ~blk
    frontier = seen
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= adj[v]
        frontier = nxt & ~seen & ~blk
        seen |= frontier
    return seen


def co_reach(g: DiGraph, targets: int, blocked: int = 0) -> int:
    """Vertices that can reach ``targets`` while avoiding ``blocked``."""
    return _reach(g.pred, targets, blocked)


def scc_and_flap(g: DiGraph, blocked: Iterable[int] | int, v: int) -> int:
    """Strongly connected component of ``v`` in ``G - blocked``."""
    blk = to_mask(blocked)
    _check_mask(g, blk, "blocked")
    if not 0 <= v < g.n:
        raise InvalidInput(f"vertex {v} outside 0..{g.n - 1}")
    if blk >> v & 1:
        raise InvalidInput(f"vertex {v} is blocked")
    return _reach(g.succ, 1 << v, blk) & _reach(g.pred, 1 << v, blk)


def sccs(g: DiGraph, blocked: int = 0) -> list[int]:
    """All SCCs of ``G - blocked`` as masks, ordered by least member."""
    rest = g.full & ~blocked
    out = []
    while rest:
        v = (rest & -rest).bit_length() - 1
        comp = _reach(g.succ, 1 << v, blocked) & _reach(g.pred, 1 << v, blocked)
        out.append(comp)
        rest &= ~comp
    return out


def source_flaps(g: DiGraph, region: int) -> list[int]:
    """SCCs of ``G[region]`` with no edge entering them from the rest of ``region``."""
    blocked = g.full & ~region
    out = []
    for comp in sccs(g, blocked):
        inn = 0
        for v in bits(comp):
            inn |= g.pred[v]
        if not inn & region & ~comp:
            out.append(comp)
    return out


def symmetric_closure(g: DiGraph) -> DiGraph:
    succ = tuple(g.succ[v] | g.pred[v] for v in range(g.n))
    return DiGraph(g.n, succ, succ)


def is_symmetric(g: DiGraph) -> bool:
    return g.succ == g.pred


def without_loops(g: DiGraph) -> DiGraph:
    return DiGraph.from_edges(g.n, [(u, v) for u, v in g.edges() if u != v])


# -- text format -------------------------------------------------------------

def parse_digraph(text: str) -> DiGraph:
    n = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "graph" and len(tok) == 2 and n is None:
                n = int(tok[1])
                if n < 0:
                    raise ValueError
            elif tok[0] == "e" and len(tok) == 3 and n is not None:
                u, v = int(tok[1]), int(tok[2])
                if not (0 <= u < n and 0 <= v < n):
                    raise InvalidInput(f"line {lineno}: edge endpoint out of range in {raw.strip()!r}")
                if (u, v) in seen:
                    raise InvalidInput(f"line {lineno}: duplicate edge {u} {v}")
                seen.add((u, v))
                edges.append((u, v))
            else:
                raise ValueError
        except ValueError as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"line {lineno}: unexpected token {tok[0]!r} in {raw.strip()!r}") from None
    if n is None:
        raise InvalidInput("missing 'graph <n>' header")
    return DiGraph.from_edges(n, edges)


def serialize_digraph(g: DiGraph) -> str:
    lines = [f"graph {g.n}"]
    lines += [f"e {u} {v}" for u, v in sorted(g.edges())]
    return "\n".join(lines) + "\n"
