import itertools

import pytest
from hypothesis import given, settings, strategies as st

from intelgame.fuzz import FuzzConfig, gen_formula, gen_game
from intelgame.game import GameModel, UnknownState, freeze
from intelgame.parser import parse
from intelgame.semantics import (
    BoundExceeded,
    Checker,
    IncompatibleAgents,
    check_intel_power,
    check_knowledge,
    explicit_mechanism,
    naive_check,
    satisfies,
    valid_in_model,
)
from intelgame.syntax import Atom, Implies, Not

saved = Atom("saved")

SMALL = FuzzConfig(max_states=4, max_agents=3, max_actions=2, max_rules=8)


def test_convoy_facts(game):
    assert satisfies(game, "1", parse("[British,Russians]{Germans} saved"))
    assert satisfies(game, "1", parse("![British]{Germans} saved"))
    assert satisfies(game, "d", parse("true"))


def test_check_knowledge(game):
    assert not check_knowledge(game, "1", set(), saved)
    assert check_knowledge(game, "s", {"Russians"}, saved)
    assert check_knowledge(game, "1", {"British"}, Not(saved))


def test_witness_routes_around_the_uboat(game):
    result = check_intel_power(game, "1", {"British", "Russians"}, {"Germans"}, saved)
    assert result.holds and result.counterexample is None
    table = {b["Germans"]: g for b, g in result.witness}
    assert set(table) == {"1", "2", "3"}
    assert table["2"]["British"] == "3"
    # first success in canonical order: British lowest safe route, Russians "1"
    assert table == {
        "1": {"British": "2", "Russians": "1"},
        "2": {"British": "3", "Russians": "1"},
        "3": {"British": "2", "Russians": "1"},
    }


def test_counterexample_without_russian_knowledge(game):
    result = check_intel_power(game, "1", {"British"}, {"Germans"}, saved)
    assert not result.holds and result.witness is None
    cx = result.counterexample
    assert cx.gammas_tried == 3
    assert cx.source in {"1", "2", "3"}
    assert set(cx.delta) == set(game.agents)
    assert all(cx.delta[a] == x for a, x in cx.beta.items())
    assert not satisfies(game, cx.outcome, saved)
    assert (cx.source, freeze(cx.delta), cx.outcome) in explicit_mechanism(game)


def test_empty_mechanism_is_vacuous():
    g = GameModel.build(["w", "v"], ["a"], ["0", "1"], valuation={"p": ["w"]})
    for w in g.states:
        assert satisfies(g, w, parse("[]{} false"))
        assert satisfies(g, w, parse("[a]{} false"))
        assert naive_check(g, w, parse("[]{a} false"))


def test_valid_in_model(game):
    assert valid_in_model(game, parse("K{}saved -> []{}saved"))
    assert not valid_in_model(game, saved)
    single = GameModel.build(["w"], ["a"], ["0"], valuation={"p": ["w"]})
    assert valid_in_model(single, parse("p -> K{}p"))


FORMULAS = [
    "saved",
    "!saved",
    "[British,Russians]{Germans} saved",
    "[British]{Germans} saved",
    "[British,Germans]{} saved",
    "[British,Germans,Russians]{} saved",
    "[Germans]{British} !saved",
    "[British]{Germans,Russians} saved",
    "[]{} saved",
    "[]{British,Germans,Russians} saved",
    "K{British} [British,Russians]{Germans} saved",
    "K{Russians} [British,Russians]{Germans} saved",
    "K{} !saved -> []{} !saved",
    "[British,Russians]{Germans} saved -> K{British,Russians}[British,Russians]{Germans} saved",
    "[Russians]{British,Germans} saved",
    "[British]{Russians,Germans} saved",
    "K{Germans} saved | K{Germans} !saved",
    "[British,Russians]{Germans} [British]{} saved",
    "!K{} saved & ![]{}saved",
    "[British]{Germans} (saved -> K{} saved)",
]


@pytest.mark.parametrize("text", FORMULAS)
def test_naive_agrees_on_fixture(game, text):
    phi = parse(text)
    for w in game.states:
        assert satisfies(game, w, phi) == naive_check(game, w, phi)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 3))
def test_naive_agrees_on_random_instances(seed, depth):
    g = gen_game(seed, SMALL)
    phi = gen_formula(seed, depth, g.agents)
    checker = Checker(g)
    for w in g.states:
        assert checker.holds(w, phi) == naive_check(g, w, phi)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_boolean_clauses_and_memo_determinism(seed):
    g = gen_game(seed, FuzzConfig())
    phi = gen_formula(seed, 3, g.agents)
    psi = gen_formula(seed + 1, 2, g.agents)
    memo, plain = Checker(g), Checker(g, memo=False)
    for w in g.states:
        assert memo.holds(w, Not(phi)) == (not memo.holds(w, phi))
        assert memo.holds(w, Implies(phi, psi)) == (not memo.holds(w, phi) or memo.holds(w, psi))
        assert memo.holds(w, phi) == plain.holds(w, phi)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_knowledge_is_constant_on_blocks(seed):
    g = gen_game(seed, FuzzConfig())
    phi = gen_formula(seed, 2, g.agents)
    checker = Checker(g)
    for size in range(len(g.agents) + 1):
        for group in itertools.combinations(g.agents, size):
            for w, v in itertools.product(g.states, repeat=2):
                if all(g.same_block(a, w, v) for a in group):
                    assert checker.knows(w, group, phi) == checker.knows(v, group, phi)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_witness_replay(seed):
    """Every delta consistent with a witnessed (beta, gamma), from any
    indistinguishable start, leads to a state satisfying the body."""
    g = gen_game(seed, FuzzConfig(max_actions=2))
    body = gen_formula(seed, 1, g.agents)
    mech = explicit_mechanism(g)
    agents = list(g.agents)
    for w in g.states:
        for split in itertools.product(range(3), repeat=len(agents)):
            actor = {a for a, s in zip(agents, split) if s == 1}
            intel = {a for a, s in zip(agents, split) if s == 2}
            result = check_intel_power(g, w, actor, intel, body)
            if not result.holds:
                continue
            assert len(result.witness) == len(g.actions) ** len(intel)
            for beta, gamma in result.witness:
                fixed = {**beta, **gamma}
                for src, delta, u in mech:
                    if all(g.same_block(a, w, src) for a in actor) and all(
                        dict(delta)[a] == x for a, x in fixed.items()
                    ):
                        assert naive_check(g, u, body)


def test_errors(game):
    with pytest.raises(IncompatibleAgents):
        satisfies(game, "1", parse("K{French} saved"))
    with pytest.raises(UnknownState):
        satisfies(game, "7", saved)
    big = GameModel.build(["w"], [f"a{i}" for i in range(6)], ["0", "1", "2"])
    with pytest.raises(BoundExceeded):
        naive_check(big, "w", saved)
    assert naive_check(big, "w", saved, bound=3**6) is False


def test_missing_atoms_are_false(game):
    assert not satisfies(game, "s", Atom("unheard_of"))

