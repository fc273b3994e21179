import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iipg.game_model import WinningCondition, perfect_game, validate
from iipg.generators import RandomSpec, gen_cycles_gadget, gen_fig4, gen_random, gen_random_perfect
from iipg.graph_core import InvalidInput, sccs
from iipg.parity_solver import solve
from iipg.powerset import lift_history, post, powerset_construct


def _pairs(pg):
    return sorted({(s, d) for s, _, d in pg.game.edges})


def _random_history(pg, rng, length):
    positions, actions = [0], []
    for _ in range(length):
        out = [(a, d) for s, a, d in pg.game.edges if s == positions[-1]]
        if not out:
            break
        a, d = rng.choice(out)
        actions.append(a)
        positions.append(d)
    return positions, actions


def test_post_cycles_entry():
    g = gen_cycles_gadget(2)
    assert post(g, {0}, {0, 1}) == {1, 3}


def test_post_empty():
    assert post(gen_cycles_gadget(2), set(), {0, 1, 2, 3}) == frozenset()


def test_post_switch_first_cycle():
    g = gen_cycles_gadget(2)
    assert post(g, {1, 3}, {2}) == {2, 3}


def test_cycles_powerset_is_four_cycle():
    pg = powerset_construct(gen_cycles_gadget(2))
    assert pg.n == 5
    assert pg.members[0] == (0,)
    assert sorted(pg.members[1:]) == [(1, 3), (1, 4), (2, 3), (2, 4)]
    inner = [(s, d) for s, d in _pairs(pg) if s and d]
    # each knowledge set switches one cycle at a time: the 4-cycle (1,3)-(2,3)-(2,4)-(1,4)
    assert len(inner) == 8
    for s, d in inner:
        diff = set(pg.members[s]) ^ set(pg.members[d])
        assert len(diff) == 2
    assert [d for s, d in _pairs(pg) if s == 0] == [pg.index([1, 3])]


def test_fig4_powerset():
    pg = powerset_construct(gen_fig4())
    assert pg.members == ((0,), (1, 2), (3, 4), (5,), (2,), (4,))
    named = {(pg.members[s], pg.members[d]) for s, d in _pairs(pg)}
    assert named == {((0,), (1, 2)), ((1, 2), (3, 4)), ((1, 2), (5,)), ((3, 4), (1, 2)),
                     ((5,), (2,)), ((2,), (5,)), ((2,), (4,)), ((4,), (1, 2))}


def test_fig4_index_round_trip():
    pg = powerset_construct(gen_fig4())
    for i, m in enumerate(pg.members):
        assert pg.index(reversed(m)) == i


def test_perfect_source_is_isomorphic():
    for seed in range(30):
        g = gen_random_perfect(7, 3, seed)
        pg = powerset_construct(g)
        assert all(len(m) == 1 for m in pg.members)
        src_pairs = {(s, d) for s, _, d in g.edges}
        reach_ = {m[0] for m in pg.members}
        assert {(pg.members[s][0], pg.members[d][0]) for s, d in _pairs(pg)} == \
            {(s, d) for s, d in src_pairs if s in reach_}
        for i, (v,) in enumerate(pg.members):
            assert pg.game.color[i] == g.color[v] and pg.game.owner[i] == g.owner[v]


def test_initial_must_be_alone():
    g = gen_fig4()
    bad = g.replace(pos_class=(1,) + g.pos_class[1:])
    with pytest.raises(InvalidInput):
        powerset_construct(bad)


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_structure_invariants(seed, r):
    g = gen_random(RandomSpec(n=8, r=r, seed=seed))
    pg = powerset_construct(g)
    assert pg.game.is_perfect()
    assert not validate(pg.game) or all(v.condition == "determinism" for v in validate(pg.game))
    bound = 1 + sum(2 ** len(c) - 1 for c in g.classes())
    assert pg.n <= bound
    for m in pg.members:
        assert m and len({g.pos_class[v] for v in m}) == 1
        assert len({g.owner[v] for v in m}) == 1 and len({g.color[v] for v in m}) == 1
    # single-step soundness
    for (s, a, d), cls in pg.source_action.items():
        for w in pg.members[d]:
            assert any(dd == w and b in cls for v in pg.members[s] for b, dd in g.out_edges(v))


@given(st.integers(0, 10_000))
def test_acyclic_source_gives_acyclic_powerset(seed):
    g = gen_random(RandomSpec(n=9, r=3, acyclic=True, seed=seed))
    pg = powerset_construct(g)
    assert all(c.bit_count() == 1 for c in sccs(pg.game.graph))
    assert not any(s == d for s, d in _pairs(pg))


@given(st.integers(0, 10_000))
def test_winner_preserved_for_perfect_sources(seed):
    g = gen_random_perfect(8, 4, seed)
    pg = powerset_construct(g)
    assert solve(pg.game).winner(0) == solve(g).winner(g.initial)


def test_safety_knowledge_set_is_bad_when_it_meets_bad():
    g = gen_fig4().replace(condition=WinningCondition.safe([3]))
    pg = powerset_construct(g)
    assert pg.game.condition.targets == {pg.index([3, 4])}


def test_reach_knowledge_set_needs_all_members():
    g = gen_fig4().replace(condition=WinningCondition.reach([3, 5]))
    pg = powerset_construct(g)
    assert pg.game.condition.targets == {pg.index([5])}


def test_seq_source_is_reduced_first():
    g = perfect_game(3, [0, 0, 0], [0, 0, 1], [(0, 1), (1, 2), (2, 0)],
                     condition=WinningCondition.sequence_forcing(3, [(0, 0, 1)]))
    pg = powerset_construct(g)
    assert pg.game.condition.kind == "reach"
    assert solve(pg.game).winner(0) == 0


def test_lift_empty_history():
    pg = powerset_construct(gen_cycles_gadget(2))
    assert lift_history(pg, [0], [], 0) == ([0], [])


def test_lift_cycles_entry():
    pg = powerset_construct(gen_cycles_gadget(2))
    us, acts = lift_history(pg, [0, pg.index([1, 3])], [0], 3)
    # action 1 enters the second cycle; it shares a class with the label 0
    assert us == [0, 3] and acts == [1]


def test_lift_rejects_non_member():
    pg = powerset_construct(gen_cycles_gadget(2))
    with pytest.raises(InvalidInput):
        lift_history(pg, [0, pg.index([1, 3])], [0], 2)


def test_lift_rejects_non_edge():
    pg = powerset_construct(gen_cycles_gadget(2))
    with pytest.raises(InvalidInput):
        lift_history(pg, [0, pg.index([2, 4])], [0], 2)


@given(st.integers(0, 10_000), st.integers(0, 12))
def test_lifted_histories_are_valid(seed, length):
    g = gen_random(RandomSpec(n=8, r=3, seed=seed))
    pg = powerset_construct(g)
    rng = random.Random(seed)
    positions, actions = _random_history(pg, rng, length)
    for last in pg.members[positions[-1]]:
        us, acts = lift_history(pg, positions, actions, last)
        assert us[-1] == last and len(us) == len(positions)
        for i, u in enumerate(us):
            assert u in pg.members[positions[i]]
        for i, a in enumerate(acts):
            assert (us[i], a, us[i + 1]) in g.edges
            assert a in pg.source_action[(positions[i], actions[i], positions[i + 1])]
