import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iipg.generators import (gen_cycles_gadget, gen_double_tree, gen_fig4, gen_halfgrid, gen_lex_tree,
                             gen_random_digraph)
from iipg.graph_core import DiGraph, InvalidInput, sccs, symmetric_closure
from iipg.powerset import powerset_construct
from iipg.search_games import (dag_width, directed_path_width, entanglement, multi_robber_width, nmdw,
                               replay, solve_dag_width_game, solve_dpw_game, tree_width)

from conftest import path
from oracles import dpw_cops_oracle, dw_oracle
from strategies import digraphs


def cycle(n):
    return DiGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def grid(n):
    idx = lambda i, j: i * n + j
    edges = []
    for i in range(n):
        for j in range(n):
            if i + 1 < n:
                edges.append((idx(i, j), idx(i + 1, j)))
            if j + 1 < n:
                edges.append((idx(i, j), idx(i, j + 1)))
    return symmetric_closure(DiGraph.from_edges(n * n, edges))


def test_acyclic_one_cop():
    assert solve_dag_width_game(path(4), 1, monotone=True).cop_win


def test_three_cycle():
    assert not solve_dag_width_game(cycle(3), 1).cop_win
    assert solve_dag_width_game(cycle(3), 2).cop_win


def test_negative_budget():
    with pytest.raises(InvalidInput):
        solve_dag_width_game(path(2), -1)


def test_fig4_powerset_dw():
    pg = powerset_construct(gen_fig4())
    out = solve_dag_width_game(pg.game.graph, 2, monotone=True)
    assert out.cop_win
    assert dag_width(pg.game.graph).cops == 2


def test_single_vertex():
    assert dag_width(DiGraph.from_edges(1, [])).value == 1


def test_halfgrid_dw():
    assert dag_width(gen_halfgrid(4).graph).value == 2


def test_lex_tree_dw():
    assert dag_width(gen_lex_tree(2, 1)).value == 4


def test_dpw_path():
    rep = directed_path_width(path(3))
    assert rep.value == 0 and rep.cops == 1


def test_dpw_cycles_gadget():
    # two cops: v0 has no in-edges, so sweeping each 2-cycle with two cops suffices
    for n in (2, 4, 6):
        rep = directed_path_width(gen_cycles_gadget(n).graph)
        assert rep.cops == 2 and rep.value == 1


def test_dpw_tree():
    rep = directed_path_width(gen_lex_tree(1, 2))
    assert rep.cops == 3 and rep.value == 2


def test_tw_tree():
    tree = symmetric_closure(DiGraph.from_edges(5, [(0, 1), (0, 2), (1, 3), (1, 4)]))
    assert tree_width(tree).value == 1


def test_tw_grid():
    assert tree_width(grid(3)).value == 3


def test_entanglement_examples():
    assert entanglement(path(5)).value == 0
    assert entanglement(gen_cycles_gadget(2).graph).value == 2
    assert entanglement(gen_double_tree(2).graph).value == 2


@given(digraphs(1, 6))
def test_entanglement_zero_iff_acyclic(g):
    acyclic = all(not (g.succ[v] >> v & 1) for v in range(g.n)) and all(c.bit_count() == 1 for c in sccs(g))
    assert (entanglement(g).value == 0) == acyclic


def test_multi_robber_invalid():
    with pytest.raises(InvalidInput):
        multi_robber_width(path(2), 0)


@settings(max_examples=40)
@given(digraphs(1, 5))
def test_dw_matches_oracle(g):
    assert dag_width(g).value == dw_oracle(g, monotone=True)
    assert nmdw(g).value == dw_oracle(g, monotone=False)


@settings(max_examples=40)
@given(digraphs(1, 5))
def test_dpw_matches_oracle(g):
    assert directed_path_width(g).cops == dpw_cops_oracle(g)


@settings(max_examples=30)
@given(digraphs(1, 6))
def test_width_orderings(g):
    dw = dag_width(g).cops
    dpw = directed_path_width(g)
    assert nmdw(g).cops <= dw <= dpw.cops
    assert directed_path_width(g, monotone=False).cops == dpw.cops
    prev = dw
    for r in range(2, 4):
        cur = multi_robber_width(g, r).cops
        assert prev <= cur <= min(dpw.cops, r * dw)
        prev = cur


@settings(max_examples=25)
@given(digraphs(1, 6))
def test_many_robbers_equal_dpw(g):
    assert multi_robber_width(g, g.n).cops == directed_path_width(g).cops


@settings(max_examples=25)
@given(digraphs(1, 6))
def test_tw_monotonicity_cost_zero(g):
    u = symmetric_closure(g)
    assert tree_width(u).value == tree_width(u, monotone=False).value
    tw = tree_width(u).cops
    for r in (2, 3):
        assert multi_robber_width(u, r).cops <= r * tw


@settings(max_examples=30)
@given(digraphs(1, 6), st.booleans())
def test_strategies_replay(g, monotone):
    rep = dag_width(g, monotone=monotone)
    res = replay(rep.witness)
    assert res.captured and res.max_cops <= rep.cops
    if monotone:
        assert res.monotone


@settings(max_examples=15)
@given(digraphs(1, 5))
def test_multi_robber_strategy_replays(g):
    rep = multi_robber_width(g, 2)
    res = replay(rep.witness)
    assert res.captured and res.monotone


@settings(max_examples=30)
@given(digraphs(1, 6))
def test_dpw_play_is_valid(g):
    ok, play, _ = solve_dpw_game(g, directed_path_width(g).cops)
    assert ok and play.clears() and play.is_monotone()


@settings(max_examples=30)
@given(digraphs(1, 6))
def test_restricted_never_cheaper(g):
    base = dag_width(g).cops
    assert dag_width(g, restricted="reach").cops >= base
    assert dag_width(g, restricted="flap").cops >= base


def test_escape_reported_below_width():
    rep = dag_width(cycle(4))
    assert rep.cops == 2 and rep.escape is not None


FALLBACK_SCRIPT = """
from iipg.generators import gen_random_digraph
from iipg.search_games import dag_width, nmdw, entanglement, directed_path_width, multi_robber_width
from iipg import _kernels
out = [_kernels.NUMBA_DISABLED]
for seed in range(6):
    g = gen_random_digraph(6, 0.35, seed)
    out.append((dag_width(g).cops, nmdw(g).cops, entanglement(g).cops,
                directed_path_width(g).cops, multi_robber_width(g, 2).cops))
print(out)
"""


def _run(flag):
    env = dict(os.environ, IIPG_DISABLE_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", FALLBACK_SCRIPT], env=env, capture_output=True,
                         text=True, check=True)
    return eval(res.stdout)


def test_fallback_matches_compiled():
    fast, slow = _run("0"), _run("1")
    assert fast[0] is False and slow[0] is True
    assert fast[1:] == slow[1:]
