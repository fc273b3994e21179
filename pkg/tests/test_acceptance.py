"""Acceptance criteria: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import random
import time

import pytest

from iipg.game_model import imperfection_radius
from iipg.generators import (RandomSpec, gen_cycles_gadget, gen_double_tree, gen_fig4, gen_halfgrid,
                             gen_lex_tree, gen_offhanded, gen_random, gen_random_perfect)
from iipg.graph_core import DiGraph, bits, reach, symmetric_closure
from iipg.parity_solver import solve, solve_parity
from iipg.powerset import powerset_construct
from iipg.search_games import (dag_width, directed_path_width, entanglement, multi_robber_width, nmdw,
                               solve_dag_width_game, tree_width)
from iipg.simulated import simulate_solve, state_bound
from iipg.strategy_lift import lift_dpw, lift_dw_nonmonotone, replay_lifted

from oracles import knowledge_minimax
from test_strategy_lift import _fig4_strategy


class Report:
    """Collects named checks; ``finish`` prints one line for the criterion and fails on any miss."""

    def __init__(self, label, capsys):
        self.label, self.capsys = label, capsys
        self.checks = []
        self.start = time.perf_counter()

    def __call__(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    def finish(self, limit_s):
        elapsed = time.perf_counter() - self.start
        self(f"under {limit_s}s", elapsed < limit_s, f"{elapsed:.1f}s")
        missed = [f"{n} ({d})" if d != "" else n for n, ok, d in self.checks if not ok]
        line = f"{self.label} {'PASS' if not missed else 'FAIL'} [{elapsed:.1f}s]"
        if missed:
            line += " missed: " + "; ".join(missed)
        with self.capsys.disabled():
            print(f"\n{line}")
        assert not missed, line


@pytest.fixture
def report(request, capsys):
    return Report(request.node.name.split("_")[1].upper(), capsys)


def _pairs(g: DiGraph):
    return {(v, w) for v in range(g.n) for w in bits(g.succ[v])}


def _connected(g: DiGraph) -> bool:
    return reach(symmetric_closure(g), 1) == g.full


def _canonical(n, edges):
    return min(tuple(sorted((p[u], p[v]) for u, v in edges)) for p in itertools.permutations(range(n)))


def small_corpus(count=500, max_n=5, seed=0):
    """Distinct (up to isomorphism) weakly connected digraphs with at most ``max_n`` vertices."""
    rng = random.Random(seed)
    seen, out = set(), []
    while len(out) < count:
        n = rng.randint(2, max_n)
        p = rng.choice([0.25, 0.4, 0.6])
        edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
        g = DiGraph.from_edges(n, edges)
        if not _connected(g):
            continue
        key = (n, _canonical(n, edges))
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out


@pytest.fixture(scope="module")
def corpus():
    return small_corpus()


def test_ac1_cycles_gadget_fixture(report):
    g = gen_cycles_gadget(2)
    pg = powerset_construct(g)
    report("5 positions", pg.n == 5, pg.n)
    cycle = [pg.index(m) for m in ([1, 3], [2, 3], [2, 4], [1, 4])]
    ring = {(cycle[i], cycle[(i + 1) % 4]) for i in range(4)} | {(cycle[(i + 1) % 4], cycle[i]) for i in range(4)}
    report("4-cycle adjacency", _pairs(pg.game.graph) == ring | {(0, pg.index([1, 3]))})
    tw = tree_width(g.graph).value
    ent = entanglement(g.graph).value
    dpw = directed_path_width(g.graph).cops
    report("tw=1", tw == 1, tw)
    report("ent=2", ent == 2, ent)
    report("dpw-cops=3", dpw == 3, dpw)
    report.finish(1)


def test_ac2_cycles_growth(report):
    pg = powerset_construct(gen_cycles_gadget(4))
    report("17 positions", pg.n == 17, pg.n)
    tw = tree_width(pg.game.graph).value
    report("tw>=4", tw >= 4, tw)
    report.finish(120)


def test_ac3_halfgrid(report):
    g = gen_halfgrid(4)
    for name, value, want in (("tw", tree_width(g.graph).value, 1), ("dw", dag_width(g.graph).value, 2),
                              ("ent", entanglement(g.graph).value, 2)):
        report(f"{name}={want}", value == want, value)
    tw = tree_width(powerset_construct(g).game.graph).value
    report("powerset tw>=3", tw >= 3, tw)
    report.finish(300)


def test_ac4_double_tree(report):
    ent = entanglement(gen_double_tree(2).graph).value
    report("source ent=2", ent == 2, ent)
    for n in (2, 4):
        pent = entanglement(powerset_construct(gen_double_tree(n)).game.graph).value
        report(f"powerset(n={n}) ent>=1", pent >= 1, pent)
    report.finish(120)


def test_ac5_fig4(report):
    g = gen_fig4()
    pg = powerset_construct(g)
    dw = dag_width(pg.game.graph).value
    report("dw(powerset)=2", dw == 2, dw)
    lifted = lift_dw_nonmonotone(g, _fig4_strategy(g), verify=False, pg=pg)
    line = lifted.play([0, pg.index([1, 2]), pg.index([3, 4])])
    state, cops = line[-1]
    names = [sorted(pg.members[i] for i in bits(c)) for _, c in line]
    report("narrated cop sets", names == [[(0,)], [(0,), (1, 2), (5,)], [(0,), (3, 4), (4,), (5,)]], names)
    reexposed = pg.index([1, 2])
    report("{1,2} re-exposed", state.cops >> reexposed & 1 and reexposed in lifted.robber_options(state, cops))
    report.finish(1)


def test_ac6_lift_bounds(report):
    dw_fail = dpw_fail = 0
    for seed in range(200):
        g = gen_random(RandomSpec(n=5 + seed % 4, r=1 + seed % 2, seed=seed))
        pg = powerset_construct(g)
        r = imperfection_radius(g).r
        k = nmdw(g.graph).cops
        f = solve_dag_width_game(g.graph, k, monotone=False, full_init=True).strategy
        res = replay_lifted(lift_dw_nonmonotone(g, f, r=r, verify=False, pg=pg))
        if not res.captured or res.max_cops > k * r * 2 ** (r - 1):
            dw_fail += 1
        play = directed_path_width(g.graph).extra["play"]
        lp = lift_dpw(g, play, pg=pg)
        if not (lp.is_monotone() and lp.clears() and lp.max_cops() <= play.max_cops() * 2 ** (r - 1)):
            dpw_fail += 1
    report("dw lift", dw_fail == 0, f"{dw_fail} of 200")
    report("dpw lift", dpw_fail == 0, f"{dpw_fail} of 200")
    report.finish(600)


def test_ac7_hierarchy_endpoints(report, corpus):
    report("corpus size", len(corpus) >= 500, len(corpus))
    bad_dw1 = bad_end = bad_mono = 0
    for g in corpus:
        dw = dag_width(g).cops
        if multi_robber_width(g, 1, engine="general").cops != dw:
            bad_dw1 += 1
        seq = [dw] + [multi_robber_width(g, r).cops for r in range(2, g.n + 1)]
        if any(a > b for a, b in zip(seq, seq[1:])):
            bad_mono += 1
        if seq[-1] != directed_path_width(g).cops:
            bad_end += 1
    report("dw_1=dw", bad_dw1 == 0, bad_dw1)
    report("dw_|V|=dpw cops", bad_end == 0, bad_end)
    report("dw_r non-decreasing", bad_mono == 0, bad_mono)
    report.finish(600)


def test_ac8_main_bound(report, corpus):
    bad = bad_tw = 0
    for g in corpus:
        dw = dag_width(g).cops
        bad += any(multi_robber_width(g, r).cops > r * dw for r in (2, 3))
        u = symmetric_closure(g)
        tw = tree_width(u).cops
        bad_tw += any(multi_robber_width(u, r).cops > r * tw for r in (2, 3))
    report("dw_r<=r*dw", bad == 0, bad)
    report("closure bound", bad_tw == 0, bad_tw)
    report.finish(600)


def test_ac9_hierarchy_values(report):
    for (k, r), measure, want in (((1, 1), "dpw", 2), ((1, 2), "dpw", 3), ((1, 2), "dw", 2), ((2, 1), "dw", 4)):
        g = gen_lex_tree(k, r)
        got = directed_path_width(g).cops if measure == "dpw" else dag_width(g).cops
        report(f"lex({k},{r}) {measure}={want}", got == want, got)
    report.finish(300)


def test_ac10_offhanded(report):
    g = gen_offhanded(1)
    dw = dag_width(g).value
    restricted = dag_width(g, restricted="flap").value
    report("dw<=3", dw <= 3, dw)
    report("restricted>=2", restricted >= 2, restricted)
    report.finish(120)


def test_ac11_simulated_oracle(report):
    wrong = over = tested = 0
    seed = 0
    while tested < 200:
        g = gen_random_perfect(4 + seed % 7, 1 + seed % 4, seed)
        seed += 1
        if nmdw(g.graph).cops > 3:
            continue
        tested += 1
        res = simulate_solve(g)
        wrong += res.winner != solve_parity(g).winner(g.initial)
        over += res.states > state_bound(g.n, res.k, len(set(g.color)))
    report("agreement", wrong == 0, f"{wrong} of {tested}")
    report("state budget", over == 0, over)
    report.finish(900)


def test_ac12_powerset_identities(report):
    iso_bad = 0
    for seed in range(500):
        g = gen_random_perfect(6 + seed % 3, 3, seed)
        pg = powerset_construct(g)
        src = {(s, d) for s, _, d in g.edges}
        mapped = {(pg.members[s][0], pg.members[d][0]) for s, _, d in pg.game.edges}
        reached = {m[0] for m in pg.members}
        iso_bad += not (all(len(m) == 1 for m in pg.members)
                        and mapped == {(s, d) for s, d in src if s in reached}
                        and all(pg.game.color[i] == g.color[m[0]] for i, m in enumerate(pg.members)))
    cyc_bad = win_bad = 0
    for seed in range(500):
        g = gen_random(RandomSpec(n=8, r=2, acyclic=True, condition="reach", seed=seed))
        pg = powerset_construct(g)
        pgraph = pg.game.graph
        cyc_bad += any(reach(pgraph, pgraph.succ[v]) >> v & 1 for v in range(pg.n))
        win_bad += solve(pg.game).winner(0) != knowledge_minimax(g, g.n)
    report("isomorphic", iso_bad == 0, iso_bad)
    report("acyclic", cyc_bad == 0, cyc_bad)
    report("minimax", win_bad == 0, win_bad)
    report.finish(600)


def test_ac13_monotonicity_cost(report, corpus):
    graphs = corpus + [gen_random_perfect(6, 2, s).graph for s in range(60)]
    dpw_bad = tw_bad = 0
    for g in graphs:
        dpw_bad += directed_path_width(g).cops != directed_path_width(g, monotone=False).cops
        u = symmetric_closure(g)
        tw_bad += tree_width(u).cops != tree_width(u, monotone=False).cops
    report("dpw", dpw_bad == 0, dpw_bad)
    report("tw", tw_bad == 0, tw_bad)
    report.finish(600)
