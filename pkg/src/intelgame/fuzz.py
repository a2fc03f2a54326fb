"""Randomized soundness checks: random games, random axiom instances.

Every random draw comes from a generator seeded by a hash of
``(seed, trial, purpose, ...)``, so any single trial can be replayed
without running the ones before it.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from .game import GameModel, model_to_dict, validate_model
from .parser import to_text
from .proof import Schema, instantiate
from .semantics import Checker, failing_states, naive_check
from .syntax import Atom, Formula, Implies, IntelPower, Knows, Not

ATOMS = ("p", "q")
TAUTOLOGY_SHAPES = 3


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    trials: int = 200
    max_states: int = 5
    max_agents: int = 3
    max_actions: int = 3
    max_formula_depth: int = 3
    max_rules: int = 12
    instances: int = 3  # per schema and trial

    def __post_init__(self):
        for name in ("max_states", "max_agents", "max_actions", "max_formula_depth", "max_rules", "instances"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")


def derive_seed(*parts) -> int:
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _rng(*parts) -> random.Random:
    return random.Random(derive_seed(*parts))


def _subset(rng: random.Random, items: Sequence[str]) -> frozenset:
    return frozenset(x for x in items if rng.random() < 0.5)


def gen_game(seed: int, cfg: FuzzConfig = FuzzConfig()) -> GameModel:
    rng = _rng("game", seed)
    n_states = rng.randint(1, cfg.max_states)
    states = [f"w{i}" for i in range(n_states)]
    agents = [f"a{i}" for i in range(rng.randint(1, cfg.max_agents))]
    actions = [str(i) for i in range(rng.randint(1, cfg.max_actions))]
    indist = {}
    for a in agents:
        n_blocks = rng.randint(1, n_states)
        assignment = {w: rng.randrange(n_blocks) for w in states}
        blocks = [[w for w in states if assignment[w] == b] for b in range(n_blocks)]
        indist[a] = [b for b in blocks if b]
    rules = []
    for _ in range(rng.randint(0, cfg.max_rules)):
        guard = {a: rng.choice(actions) for a in agents if rng.random() < 0.5}
        rules.append((rng.choice(states), guard, rng.choice(states)))
    valuation = {p: [w for w in states if rng.random() < 0.5] for p in ATOMS}
    g = GameModel.build(states, agents, actions, indist, rules, valuation)
    assert not validate_model(g)
    return g


def _formula(rng: random.Random, depth: int, agents: Sequence[str], atoms: Sequence[str]) -> Formula:
    if depth <= 0 or rng.random() < 0.2:
        return Atom(rng.choice(atoms))
    kind = rng.randrange(5)
    sub = depth - 1
    if kind == 0:
        return Not(_formula(rng, sub, agents, atoms))
    if kind == 1:
        return Implies(_formula(rng, sub, agents, atoms), _formula(rng, sub, agents, atoms))
    if kind == 2:
        return Knows(_subset(rng, agents), _formula(rng, sub, agents, atoms))
    actor = _subset(rng, agents)
    intel = _subset(rng, agents) - actor
    return IntelPower(actor, intel, _formula(rng, sub, agents, atoms))


def gen_formula(seed: int, depth: int, agents: Sequence[str], atoms: Sequence[str] = ATOMS) -> Formula:
    """Random formula of depth at most ``depth`` (exactly an atom for depth 0)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return _formula(_rng("formula", seed), depth, list(agents), list(atoms))


def _disjoint_groups(rng: random.Random, agents: Sequence[str], k: int) -> list[frozenset]:
    # each agent lands in one of k groups or in none
    slots = [rng.randrange(k + 1) for _ in agents]
    return [frozenset(a for a, s in zip(agents, slots) if s == i) for i in range(k)]


def random_substitution(schema: Schema, rng: random.Random, agents, atoms, depth: int) -> dict:
    """A substitution for ``schema`` meeting its side condition by construction."""

    def f():
        return _formula(rng, rng.randint(0, depth), agents, atoms)

    if schema in (Schema.Truth, Schema.NegIntrospection):
        return {"C": _subset(rng, agents), "phi": f()}
    if schema is Schema.Distributivity:
        return {"C": _subset(rng, agents), "phi": f(), "psi": f()}
    if schema is Schema.EpistemicMono:
        c = _subset(rng, agents)
        return {"C": c, "D": c | _subset(rng, agents), "phi": f()}
    if schema is Schema.StrategicIntrospection:
        c, b = _disjoint_groups(rng, agents, 2)
        return {"C": c, "B": b, "phi": f()}
    if schema is Schema.EmptyCoalition:
        return {"phi": f()}
    if schema is Schema.Cooperation:
        b, c, d = _disjoint_groups(rng, agents, 3)
        return {"B": b, "C": c, "D": d, "phi": f(), "psi": f()}
    if schema is Schema.IntelMono:
        c, wide = _disjoint_groups(rng, agents, 2)
        return {"C": c, "B": _subset(rng, sorted(wide)), "B'": wide, "phi": f()}
    if schema is Schema.NoneToAnalyze:
        return {"B": _subset(rng, agents), "phi": f()}
    raise ValueError(schema)


def instantiate_axiom(
    schema: Schema,
    seed: int,
    cfg: FuzzConfig = FuzzConfig(),
    agents: Sequence[str] | None = None,
    atoms: Sequence[str] = ATOMS,
) -> Formula:
    if agents is None:
        agents = [f"a{i}" for i in range(cfg.max_agents)]
    rng = _rng("axiom", Schema(schema).value, seed)
    depth = max(0, cfg.max_formula_depth - 1)
    return instantiate(Schema(schema), random_substitution(Schema(schema), rng, list(agents), atoms, depth))


def _tautology(rng: random.Random, agents, atoms, depth: int) -> Formula:
    a, b, c = (_formula(rng, rng.randint(0, depth), agents, atoms) for _ in range(3))
    shape = rng.randrange(TAUTOLOGY_SHAPES)
    if shape == 0:
        return Implies(a, Implies(b, a))
    if shape == 1:
        return Implies(Implies(a, Implies(b, c)), Implies(Implies(a, b), Implies(a, c)))
    return Implies(Implies(Not(a), Not(b)), Implies(b, a))


@dataclass
class Violation:
    seed: int
    trial: int
    check: str
    formula: str
    state: str
    model: dict

    def sort_key(self):
        return (self.seed, self.trial, self.check, self.formula, self.state)


@dataclass
class FuzzReport:
    trials: int = 0
    trials_run: dict[str, int] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.violations

    def merge(self, other: "FuzzReport") -> None:
        self.trials += other.trials
        for k, v in other.trials_run.items():
            self.trials_run[k] = self.trials_run.get(k, 0) + v
        self.violations.extend(other.violations)
        self.violations.sort(key=Violation.sort_key)

    def to_dict(self) -> dict:
        return {
            "sound": self.sound,
            "trials": self.trials,
            "trials_run": dict(sorted(self.trials_run.items())),
            "violations": [asdict(v) for v in self.violations],
        }


CheckerFactory = Callable[[GameModel], Checker]


def run_trial(cfg: FuzzConfig, trial: int, make_checker: CheckerFactory = Checker) -> FuzzReport:
    """One game, all schemas, necessitation and modus ponens checks."""
    g = gen_game(derive_seed(cfg.seed, trial), cfg)
    checker = make_checker(g)
    agents = list(g.agents)
    depth = max(0, cfg.max_formula_depth - 1)
    report = FuzzReport(trials=1)
    model = None

    def record(check: str, phi: Formula, states: Iterable[str]):
        nonlocal model
        report.trials_run[check] = report.trials_run.get(check, 0) + 1
        states = list(states)
        if states:
            model = model or model_to_dict(g)
            text = to_text(phi)
            for w in states:
                report.violations.append(Violation(cfg.seed, trial, check, text, w, model))

    premises = []
    for schema in Schema:
        for k in range(cfg.instances):
            phi = instantiate_axiom(schema, derive_seed(cfg.seed, trial, k), cfg, agents=agents)
            record(schema.value, phi, failing_states(g, phi, checker))
            premises.append(phi)

    rng = _rng("extra", cfg.seed, trial)
    for _ in range(cfg.instances):
        phi = _tautology(rng, agents, ATOMS, depth)
        record("Tautology", phi, failing_states(g, phi, checker))
        premises.append(phi)
    for _ in range(cfg.instances):
        premises.append(_formula(rng, cfg.max_formula_depth, agents, ATOMS))

    # necessitation preserves validity in the model, not truth at a state
    for phi in premises:
        if failing_states(g, phi, checker):
            continue
        c, b = _disjoint_groups(rng, agents, 2)
        nk = Knows(_subset(rng, agents), phi)
        record("NecK", nk, failing_states(g, nk, checker))
        ns = IntelPower(c, b, phi)
        record("NecS", ns, failing_states(g, ns, checker))

    for _ in range(cfg.instances):
        phi = _formula(rng, depth, agents, ATOMS)
        psi = _formula(rng, depth, agents, ATOMS)
        bad = [
            w
            for w in g.states
            if checker.holds(w, phi) and checker.holds(w, Implies(phi, psi)) and not checker.holds(w, psi)
        ]
        record("MP", psi, bad)
    report.violations.sort(key=Violation.sort_key)
    return report


def fuzz_soundness(cfg: FuzzConfig = FuzzConfig(), make_checker: CheckerFactory = Checker) -> FuzzReport:
    report = FuzzReport()
    for trial in range(cfg.trials):
        report.merge(run_trial(cfg, trial, make_checker))
    return report


# -- oracle campaign ------------------------------------------------------------


@dataclass(frozen=True)
class OracleConfig:
    seed: int = 0
    trials: int = 1000
    max_states: int = 4
    max_agents: int = 3
    max_actions: int = 2
    max_formula_depth: int = 3
    max_rules: int = 8


@dataclass
class Discrepancy:
    trial: int
    state: str
    formula: str
    fast: bool
    naive: bool
    model: dict


def oracle_instance(cfg: OracleConfig, trial: int) -> tuple[GameModel, str, Formula]:
    game_cfg = FuzzConfig(
        max_states=cfg.max_states,
        max_agents=cfg.max_agents,
        max_actions=cfg.max_actions,
        max_formula_depth=cfg.max_formula_depth,
        max_rules=cfg.max_rules,
    )
    g = gen_game(derive_seed("oracle", cfg.seed, trial), game_cfg)
    rng = _rng("oracle-pick", cfg.seed, trial)
    w = rng.choice(g.states)
    phi = gen_formula(derive_seed("oracle", cfg.seed, trial), rng.randint(0, cfg.max_formula_depth), g.agents)
    return g, w, phi


def oracle_diff(cfg: OracleConfig = OracleConfig()) -> list[Discrepancy]:
    """Compare the memoized checker with the literal enumeration on random instances."""
    out = []
    for trial in range(cfg.trials):
        g, w, phi = oracle_instance(cfg, trial)
        fast = Checker(g).holds(w, phi)
        slow = naive_check(g, w, phi)
        if fast != slow:
            out.append(Discrepancy(trial, w, to_text(phi), fast, slow, model_to_dict(g)))
    return out
