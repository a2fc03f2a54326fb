"""Exit criteria. Each test prints one ACCEPTANCE line with its verdict."""

import random
import time

import pytest

from intelgame.fuzz import FuzzConfig, OracleConfig, _disjoint_groups, _formula, derive_seed, fuzz_soundness, gen_game, oracle_diff
from intelgame.game import atlantic, matches, profiles
from intelgame.parser import parse
from intelgame.proof import Schema, check_proof, load_script, mutants
from intelgame.semantics import Checker, naive_check, satisfies
from intelgame.syntax import IntelPower, Knows

SUITE = [
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


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def test_1_convoy_facts(verdict):
    start = time.perf_counter()
    g = atlantic()
    with_russians = satisfies(g, "1", parse("[British,Russians]{Germans} saved"))
    british_alone = satisfies(g, "1", parse("[British]{Germans} saved"))
    elapsed = time.perf_counter() - start
    verdict(
        1,
        with_russians is True and british_alone is False and elapsed < 1.0,
        f"[British,Russians]{{Germans}} saved = {with_russians}, "
        f"[British]{{Germans}} saved = {british_alone}, {elapsed:.3f}s (< 1 s)",
    )


def test_2_wildcard_expansion(verdict):
    g = atlantic()
    wanted = {("1", (("British", "2"), ("Germans", "3")), "s"), ("1", (("British", "3"), ("Germans", "2")), "s")}
    rules = [r for r in g.rules if (r.src, r.guard, r.dst) in wanted]
    triples = set()
    for rule in rules:
        for delta in profiles(g.agents, g.actions):
            if matches(rule.guard, delta):
                bgr = delta["British"] + delta["Germans"] + delta["Russians"]
                triples.add((rule.src, bgr, rule.dst))
    expected = {("1", x, "s") for x in ("231", "232", "233", "321", "322", "323")}
    verdict(2, len(rules) == 2 and triples == expected, f"{len(rules)} rules expand to {sorted(t[1] for t in triples)}")


def test_3_oracle_equivalence(verdict):
    start = time.perf_counter()
    cfg = OracleConfig(trials=1000, max_states=4, max_agents=3, max_actions=2, max_formula_depth=3)
    random_diffs = oracle_diff(cfg)
    g = atlantic()
    fixture_diffs = []
    checker = Checker(g)
    for text in SUITE:
        phi = parse(text)
        for w in g.states:
            if checker.holds(w, phi) != naive_check(g, w, phi):
                fixture_diffs.append((text, w))
    elapsed = time.perf_counter() - start
    verdict(
        3,
        not random_diffs and not fixture_diffs and elapsed < 60 and len(SUITE) == 20,
        f"{len(random_diffs)} random + {len(fixture_diffs)} fixture discrepancies over "
        f"{cfg.trials} random instances and {len(SUITE)}x{len(g.states)} fixture checks, {elapsed:.1f}s (< 60 s)",
    )


def test_4_proof_transcripts(verdict, data_dir):
    details = []
    ok = True
    for name in ("lemma_subscript_monotonicity.proof", "lemma_positive_introspection.proof"):
        script = load_script(data_dir / name)
        accepted = check_proof(script).ok
        muts = mutants(script)
        rejected = sum(not check_proof(m).ok for _, m in muts)
        ok &= accepted and len(muts) >= 20 and rejected == len(muts)
        details.append(f"{name}: verified={accepted}, {rejected}/{len(muts)} mutants rejected")
    verdict(4, ok, "; ".join(details))


def test_5_soundness_fuzz(verdict):
    start = time.perf_counter()
    cfg = FuzzConfig(trials=200, instances=3)
    report = fuzz_soundness(cfg)
    elapsed = time.perf_counter() - start
    per_schema = [report.trials_run.get(s.value, 0) for s in Schema]
    ok = (
        report.sound
        and all(n == 600 for n in per_schema)
        and report.trials_run.get("NecK", 0) > 0
        and report.trials_run.get("NecS", 0) > 0
        and elapsed < 300
    )
    verdict(
        5,
        ok,
        f"{len(report.violations)} violations; {report.trials} games, {sum(per_schema)} axiom instances, "
        f"{report.trials_run.get('NecK', 0)}+{report.trials_run.get('NecS', 0)} necessitation checks, "
        f"{elapsed:.1f}s (< 300 s)",
    )


def test_6_monotonicity_properties(verdict):
    cfg = FuzzConfig()
    counterexamples = {"coalition": 0, "intelligence": 0, "introspection": 0}
    nonvacuous = dict.fromkeys(counterexamples, 0)
    for i in range(500):
        g = gen_game(derive_seed("monotone", i), cfg)
        rng = random.Random(derive_seed("monotone-draw", i))
        agents = list(g.agents)
        checker = Checker(g)
        phi = _formula(rng, rng.randint(0, 2), agents, ["p", "q"])
        c, b = _disjoint_groups(rng, agents, 2)
        outside_b = [a for a in agents if a not in b]
        outside_c = [a for a in agents if a not in c]
        c_wide = c | {a for a in outside_b if rng.random() < 0.5}
        b_wide = b | {a for a in outside_c if rng.random() < 0.5}
        base = IntelPower(c, b, phi)
        pairs = {
            "coalition": IntelPower(c_wide, b, phi),
            "intelligence": IntelPower(c, b_wide, phi),
            "introspection": Knows(c, base),
        }
        for w in g.states:
            if not checker.holds(w, base):
                continue
            for key, conclusion in pairs.items():
                nonvacuous[key] += 1
                if not checker.holds(w, conclusion):
                    counterexamples[key] += 1
    ok = not any(counterexamples.values()) and all(nonvacuous.values())
    verdict(
        6,
        ok,
        f"counterexamples {counterexamples} over 500 instances each "
        f"(states where the premise held: {nonvacuous})",
    )
