import pytest

from intelgame.fuzz import (
    FuzzConfig,
    OracleConfig,
    fuzz_soundness,
    gen_formula,
    gen_game,
    instantiate_axiom,
    oracle_diff,
    run_trial,
)
from intelgame.game import loads_model, dumps, validate_model
from intelgame.parser import parse
from intelgame.proof import Schema, match_axiom
from intelgame.semantics import Checker
from intelgame.syntax import Atom, IntelPower, depth, walk


def test_gen_game_is_deterministic():
    assert gen_game(42) == gen_game(42)
    assert gen_game(42) != gen_game(43)


def test_generated_games_validate():
    for seed in range(100):
        assert validate_model(gen_game(seed)) == []


def test_single_state_games():
    cfg = FuzzConfig(max_states=1)
    for seed in range(20):
        g = gen_game(seed, cfg)
        assert g.states == ("w0",)
        for a in g.agents:
            assert g.partition(a) == [frozenset({"w0"})]


def test_gen_formula():
    assert isinstance(gen_formula(3, 0, ["a"]), Atom)
    assert gen_formula(9, 3, ["a", "b"]) == gen_formula(9, 3, ["a", "b"])
    for seed in range(10_000):
        phi = gen_formula(seed, 3, ["a", "b", "c"])
        assert depth(phi) <= 3
        for node in walk(phi):
            if isinstance(node, IntelPower):
                assert not node.actor & node.intel
    with pytest.raises(ValueError):
        gen_formula(0, -1, ["a"])


@pytest.mark.parametrize("schema", list(Schema))
def test_instantiate_axiom_matches(schema):
    for seed in range(50):
        phi = instantiate_axiom(schema, seed)
        s = match_axiom(schema, phi)
        if schema is Schema.Cooperation:
            assert not (s["B"] & s["C"] or s["B"] & s["D"] or s["C"] & s["D"])


def test_instance_shapes():
    truth = instantiate_axiom(Schema.Truth, 5)
    assert truth.left.body == truth.right
    none = instantiate_axiom(Schema.NoneToAnalyze, 5)
    assert none.left.actor == frozenset() and none.right == IntelPower(set(), set(), none.left.body)


def test_zero_trials():
    report = fuzz_soundness(FuzzConfig(trials=0))
    assert report.trials == 0 and report.trials_run == {} and report.violations == []


def test_config_bounds():
    with pytest.raises(ValueError):
        FuzzConfig(max_states=0)


def test_small_campaign_is_sound():
    report = fuzz_soundness(FuzzConfig(trials=20, seed=3))
    assert report.sound
    assert all(report.trials_run[s.value] == 60 for s in Schema)
    assert report.trials_run["NecK"] > 0 and report.trials_run["MP"] == 60


def test_broken_checker_is_caught():
    # strategy only has to work from the actual state, not from every indistinguishable one
    report = fuzz_soundness(FuzzConfig(trials=60), make_checker=lambda g: Checker(g, uniform=False))
    checks = {v.check for v in report.violations}
    assert "StrategicIntrospection" in checks
    v = next(v for v in report.violations if v.check == "StrategicIntrospection")
    # the violation carries a reloadable model that still exhibits it
    g = loads_model(dumps(v.model))
    assert not Checker(g, uniform=False).holds(v.state, parse(v.formula))
    assert Checker(g).holds(v.state, parse(v.formula))


def test_trials_reproduce_individually():
    broken = lambda g: Checker(g, uniform=False)  # noqa: E731
    cfg = FuzzConfig(trials=30, seed=11)
    full = fuzz_soundness(cfg, broken)
    assert full.violations
    trial = full.violations[-1].trial
    alone = run_trial(cfg, trial, broken)
    assert alone.violations == [v for v in full.violations if v.trial == trial]
    assert run_trial(cfg, trial, broken) == alone


def test_violations_are_sorted():
    report = fuzz_soundness(FuzzConfig(trials=40), make_checker=lambda g: Checker(g, uniform=False))
    keys = [v.sort_key() for v in report.violations]
    assert keys == sorted(keys)


def test_oracle_diff_small():
    assert oracle_diff(OracleConfig(trials=200, seed=5)) == []


def test_oracle_catches_a_broken_checker():
    from intelgame.fuzz import oracle_instance
    from intelgame.semantics import naive_check

    cfg = OracleConfig(trials=1000)
    diffs = 0
    for trial in range(cfg.trials):
        g, w, phi = oracle_instance(cfg, trial)
        diffs += Checker(g, uniform=False).holds(w, phi) != naive_check(g, w, phi)
    assert diffs > 0
