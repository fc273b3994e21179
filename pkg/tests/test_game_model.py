import pytest
from hypothesis import given
from hypothesis import strategies as st

from iipg.game_model import (ImperfectGame, WinningCondition, imperfection_radius, parse_game,
                             perfect_game, serialize_game, validate)
from iipg.generators import (RandomSpec, gen_cycles_gadget, gen_double_tree, gen_fig4, gen_halfgrid,
                             gen_paths_gadget, gen_random)
from iipg.graph_core import InvalidInput

MINIMAL = """iipg 1
positions 1
pos 0 0 0 0
edge 0 0 0
init 0
cond parity
"""


def test_minimal_round_trip():
    g = parse_game(MINIMAL)
    assert g.n == 1 and g.edges == ((0, 0, 0),)
    assert parse_game(serialize_game(g)).edges == g.edges
    assert serialize_game(parse_game(serialize_game(g))) == serialize_game(g)


def test_missing_act_section_gives_singleton_classes():
    g = parse_game("iipg 1\npositions 2\npos 0 1 1 0\npos 1 1 1 1\nedge 0 1\nedge 0 1\ninit 0\n")
    assert len(g.edges) == 2
    assert g.is_perfect()


def test_parse_errors():
    with pytest.raises(InvalidInput, match="99"):
        parse_game(MINIMAL.replace("edge 0 0 0", "edge 0 0 99"))
    with pytest.raises(InvalidInput, match="line 3"):
        parse_game(MINIMAL.replace("pos 0 0 0 0", "pos 0 x 0 0"))
    with pytest.raises(InvalidInput, match="duplicate"):
        parse_game(MINIMAL.replace("pos 0 0 0 0", "pos 0 0 0 0\npos 0 0 0 0"))
    two = "iipg 1\npositions 2\npos 0 0 0 0\npos 1 0 0 0\nedge 0 0 1\ninit 0\n"
    with pytest.raises(InvalidInput, match="alone"):
        parse_game(two)


def test_condition_one_violation_names_both():
    g = ImperfectGame(n=3, owner=(0, 0, 1), color=(0, 0, 0), pos_class=(0, 1, 1),
                      act_class={0: 0, 1: 1}, edges=((0, 0, 1), (0, 1, 2)), initial=0,
                      condition=WinningCondition.parity())
    rep = validate(g)
    hits = [v for v in rep if v.condition == "condition-1"]
    assert hits and set(hits[0].witnesses) == {1, 2}


def test_condition_two_and_three():
    # two equivalent actions at a Player-0 position
    g = ImperfectGame(n=3, owner=(0, 1, 1), color=(0, 0, 0), pos_class=(0, 1, 2),
                      act_class={0: 0, 1: 0}, edges=((0, 0, 1), (0, 1, 2)), initial=0,
                      condition=WinningCondition.parity())
    assert any(v.condition == "condition-2" for v in validate(g))
    h = ImperfectGame(n=3, owner=(1, 0, 0), color=(0, 0, 0), pos_class=(0, 1, 1),
                      act_class={0: 0, 1: 1, 2: 2}, edges=((0, 0, 1), (0, 1, 2), (1, 2, 1)), initial=0,
                      condition=WinningCondition.parity())
    assert any(v.condition == "condition-3" for v in validate(h))


def test_condition_four():
    g = ImperfectGame(n=3, owner=(1, 1, 1), color=(0, 1, 2), pos_class=(0, 1, 1),
                      act_class={0: 0, 1: 1}, edges=((0, 0, 1), (0, 1, 2)), initial=0,
                      condition=WinningCondition.parity())
    assert [v.condition for v in validate(g)] == ["condition-4"]


@pytest.mark.parametrize("make", [lambda: gen_cycles_gadget(2), lambda: gen_cycles_gadget(4),
                                  lambda: gen_paths_gadget(2), lambda: gen_halfgrid(4),
                                  lambda: gen_double_tree(2), gen_fig4])
def test_generator_games_are_valid(make):
    assert validate(make()) == []


def test_perfect_game_valid():
    g = perfect_game(3, [0, 1, 0], [1, 2, 3], [(0, 1), (1, 2), (2, 0)])
    assert validate(g) == [] and imperfection_radius(g).r == 1


def test_imperfection_radius():
    assert imperfection_radius(gen_cycles_gadget(2)).r == 4
    assert imperfection_radius(gen_cycles_gadget(4)).r == 8
    assert imperfection_radius(gen_halfgrid(4)).r == 2
    assert imperfection_radius(gen_fig4()).r == 2


def test_cycles_gadget_reparses_identically():
    g = gen_cycles_gadget(2)
    h = parse_game(serialize_game(g))
    assert (h.owner, h.color, h.pos_class, sorted(h.edges)) == (g.owner, g.color, g.pos_class, sorted(g.edges))
    assert h.act_class == g.act_class


def test_sequence_condition_round_trip():
    g = perfect_game(2, [0, 1], [0, 1], [(0, 1), (1, 0)],
                     condition=WinningCondition.sequence_forcing(2, [(0, 1), (1, 1)]))
    h = parse_game(serialize_game(g))
    assert h.condition.kind == "seq" and set(h.condition.seqs) == {(0, 1), (1, 1)}
    with pytest.raises(InvalidInput):
        WinningCondition.sequence_forcing(2, [(0, 1, 1)])


@given(st.integers(1, 9), st.integers(1, 3), st.integers(1, 3), st.integers(0, 10_000),
       st.sampled_from(["parity", "reach", "safe"]), st.booleans())
def test_random_games_valid_and_canonical(n, colors, r, seed, cond, acyclic):
    g = gen_random(RandomSpec(n=n, colors=colors, r=r, seed=seed, condition=cond, acyclic=acyclic))
    assert validate(g) == []
    text = serialize_game(g)
    assert serialize_game(parse_game(text)) == text
    for v in range(g.n):
        for a, _ in g.out_edges(v):
            assert a in g.act(v)
