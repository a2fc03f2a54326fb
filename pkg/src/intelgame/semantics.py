"""Satisfaction relation for games.

``[C]_B phi`` holds at ``w`` when for every profile ``beta`` of ``B`` there
is one profile ``gamma`` of ``C`` such that every transition consistent
with ``beta`` and ``gamma``, taken from any state ``C`` cannot distinguish
from ``w``, ends in a state satisfying ``phi``.

:class:`Checker` is the production path (memoized, wildcard-aware);
:func:`naive_check` is an unmemoized literal enumeration kept as an oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .game import (
    GameModel,
    ModelError,
    State,
    block_of,
    freeze,
    matches,
    outcomes,
    profiles,
    validate_model,
)
from .syntax import (
    Atom,
    Formula,
    Implies,
    IntelPower,
    Knows,
    Not,
    agents_of,
    coalition,
    mk_intel_power,
    sorted_agents,
)

DEFAULT_NAIVE_BOUND = 3**5


class IncompatibleAgents(ValueError):
    def __init__(self, missing: Iterable[str]):
        self.missing = sorted(missing)
        super().__init__("formula mentions agents not in the model: " + ", ".join(self.missing))


class BoundExceeded(ValueError):
    pass


@dataclass
class Counterexample:
    beta: dict
    gammas_tried: int
    delta: Optional[dict] = None
    source: Optional[State] = None
    outcome: Optional[State] = None

    def to_dict(self) -> dict:
        return {
            "beta": dict(sorted(self.beta.items())),
            "gammas_tried": self.gammas_tried,
            "delta": None if self.delta is None else dict(sorted(self.delta.items())),
            "from": self.source,
            "to": self.outcome,
        }


@dataclass
class CheckResult:
    holds: bool
    # (beta, gamma) pairs in canonical beta order; only for intelligence power
    witness: Optional[list[tuple[dict, dict]]] = None
    counterexample: Optional[Counterexample] = None

    def __bool__(self) -> bool:
        return self.holds

    def witness_table(self) -> Optional[list[dict]]:
        if self.witness is None:
            return None
        return [
            {"beta": dict(sorted(b.items())), "gamma": dict(sorted(c.items()))}
            for b, c in self.witness
        ]


class Checker:
    """Model checker bound to one game; the memo table lives and dies with it.

    ``uniform=False`` drops the indistinguishability requirement on the
    starting state of the strategy (only ``w`` itself is considered).  That
    variant is deliberately unsound and exists to test the fuzz harness.
    """

    def __init__(self, g: GameModel, memo: bool = True, uniform: bool = True, validate: bool = True):
        if validate:
            diags = validate_model(g)
            if diags:
                raise ModelError(diags)
        self.g = g
        self.memo = memo
        self.uniform = uniform
        self._cache: dict[tuple[State, Formula], bool] = {}
        self._agents = frozenset(g.agents)

    def require_agents(self, phi: Formula) -> None:
        missing = agents_of(phi) - self._agents
        if missing:
            raise IncompatibleAgents(missing)

    def holds(self, w: State, phi: Formula) -> bool:
        key = (w, phi)
        if self.memo:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        value = self._eval(w, phi)
        if self.memo:
            self._cache[key] = value
        return value

    def _eval(self, w: State, phi: Formula) -> bool:
        if isinstance(phi, Atom):
            return w in self.g.valuation.get(phi.name, ())
        if isinstance(phi, Not):
            return not self.holds(w, phi.body)
        if isinstance(phi, Implies):
            return not self.holds(w, phi.left) or self.holds(w, phi.right)
        if isinstance(phi, Knows):
            return self.knows(w, phi.group, phi.body)
        if isinstance(phi, IntelPower):
            return self.intel_power(w, phi.actor, phi.intel, phi.body, witness=False).holds
        raise TypeError(f"not a formula: {phi!r}")

    def knows(self, w: State, group: Iterable[str], phi: Formula) -> bool:
        return all(self.holds(v, phi) for v in block_of(self.g, group, w))

    def _first_failure(self, starts, fixed, phi):
        for src in starts:
            for u, delta in outcomes(self.g, src, fixed).items():
                if not self.holds(u, phi):
                    return delta, src, u
        return None

    def intel_power(self, w, actor, intel, phi, witness: bool = True) -> CheckResult:
        starts = block_of(self.g, actor, w) if self.uniform else [w]
        actions = self.g.actions
        table = []
        for beta in profiles(intel, actions):
            tried = 0
            failure = None
            for gamma in profiles(actor, actions):
                tried += 1
                failure = self._first_failure(starts, {**beta, **gamma}, phi)
                if failure is None:
                    if witness:
                        table.append((beta, gamma))
                    break
            else:
                delta, src, u = failure if failure else (None, None, None)
                return CheckResult(
                    False,
                    counterexample=Counterexample(
                        beta, tried, None if delta is None else dict(delta), src, u
                    ),
                )
        return CheckResult(True, witness=table if witness else None)


def _prepare(g: GameModel, w, phi: Formula, memo: bool = True) -> tuple[Checker, State]:
    checker = Checker(g, memo=memo)
    checker.require_agents(phi)
    return checker, g.check_state(w)


def satisfies(g: GameModel, w, phi: Formula, memo: bool = True) -> bool:
    checker, w = _prepare(g, w, phi, memo)
    return checker.holds(w, phi)


def check_knowledge(g: GameModel, w, group: Iterable[str], phi: Formula) -> bool:
    group = coalition(group)
    checker, w = _prepare(g, w, Knows(group, phi))
    return checker.knows(w, group, phi)


def check_intel_power(g: GameModel, w, actor, intel, phi: Formula) -> CheckResult:
    """Decide ``[actor]_intel phi`` at ``w`` with a witness or counterexample.

    The witness maps every intel profile to the first actor profile (in
    canonical order) that works; the counterexample names an intel profile
    for which every actor profile fails, with the failing transition of the
    last one tried.
    """
    node = mk_intel_power(actor, intel, phi)
    checker, w = _prepare(g, w, node)
    return checker.intel_power(w, node.actor, node.intel, phi)


def check(g: GameModel, w, phi: Formula) -> CheckResult:
    """Like :func:`satisfies`, but with witness detail for intelligence-power formulas."""
    checker, w = _prepare(g, w, phi)
    if isinstance(phi, IntelPower):
        return checker.intel_power(w, phi.actor, phi.intel, phi.body)
    return CheckResult(checker.holds(w, phi))


def failing_states(g: GameModel, phi: Formula, checker: Checker | None = None) -> list[State]:
    if checker is None:
        checker = Checker(g)
    checker.require_agents(phi)
    return [w for w in g.states if not checker.holds(w, phi)]


def valid_in_model(g: GameModel, phi: Formula, checker: Checker | None = None) -> bool:
    return not failing_states(g, phi, checker)


# -- oracle -------------------------------------------------------------------


def explicit_mechanism(g: GameModel) -> set:
    """Every triple ``(w, delta, u)`` denoted by the rules, by full expansion."""
    deltas = [freeze(d) for d in profiles(g.agents, g.actions)]
    return {
        (r.src, d, r.dst) for r in g.rules for d in deltas if matches(r.guard, dict(d))
    }


def naive_check(g: GameModel, w, phi: Formula, bound: int = DEFAULT_NAIVE_BOUND) -> bool:
    """Literal reading of the satisfaction clauses over all complete profiles.

    No memoization and no wildcard shortcuts; refuses games with more than
    ``bound`` complete profiles.
    """
    n_profiles = len(g.actions) ** len(g.agents)
    if n_profiles > bound:
        raise BoundExceeded(f"{n_profiles} complete profiles exceed bound {bound}")
    missing = agents_of(phi) - set(g.agents)
    if missing:
        raise IncompatibleAgents(missing)
    w = g.check_state(w)
    mech = explicit_mechanism(g)
    deltas = [dict(d) for d in profiles(g.agents, g.actions)]
    states = g.states

    def indist(group, v, x):
        return all(g.same_block(a, v, x) for a in group)

    def agree(part: dict, delta: dict) -> bool:
        return all(delta[a] == x for a, x in part.items())

    def sat(v, f) -> bool:
        if isinstance(f, Atom):
            return v in g.valuation.get(f.name, ())
        if isinstance(f, Not):
            return not sat(v, f.body)
        if isinstance(f, Implies):
            return not sat(v, f.left) or sat(v, f.right)
        if isinstance(f, Knows):
            return all(sat(x, f.body) for x in states if indist(f.group, v, x))
        if isinstance(f, IntelPower):
            actor, intel = sorted_agents(f.actor), sorted_agents(f.intel)
            for beta_vals in itertools.product(g.actions, repeat=len(intel)):
                beta = dict(zip(intel, beta_vals))
                if not any(
                    all(
                        sat(u, f.body)
                        for delta in deltas
                        if agree(beta, delta) and agree(gamma, delta)
                        for x in states
                        if indist(actor, v, x)
                        for u in states
                        if (x, freeze(delta), u) in mech
                    )
                    for gamma in (
                        dict(zip(actor, vals))
                        for vals in itertools.product(g.actions, repeat=len(actor))
                    )
                ):
                    return False
            return True
        raise TypeError(f"not a formula: {f!r}")

    return sat(w, phi)
