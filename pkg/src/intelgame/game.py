"""Finite imperfect-information games with wildcard transition rules.

A game is ``(W, {~a}, Delta, M, pi)``.  Indistinguishability is given as a
partition of the states per agent, and the mechanism ``M`` is a set of
rules ``(from, guard, to)`` where ``guard`` binds some agents to actions
and leaves every other agent free (a wildcard).  A rule therefore stands
for all triples ``(from, delta, to)`` whose complete profile ``delta``
extends the guard.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import yaml

from .syntax import Agent, sorted_agents

State = str
Action = str
# A profile in hashable canonical form: ((agent, action), ...) sorted by agent.
Profile = tuple


class UnknownAgent(KeyError):
    pass


class UnknownState(KeyError):
    pass


class ModelError(ValueError):
    """Raised when a model file cannot be loaded or fails validation."""

    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


def freeze(assignment: Mapping[Agent, Action]) -> Profile:
    return tuple(sorted(assignment.items()))


def fmt_profile(p: Mapping[Agent, Action] | Profile) -> str:
    items = p if isinstance(p, tuple) else freeze(p)
    return "{" + ", ".join(f"{a}: {x}" for a, x in items) + "}"


@dataclass(frozen=True)
class TransitionRule:
    src: State
    guard: Profile
    dst: State

    @classmethod
    def make(cls, src, guard: Mapping[Agent, Action], dst) -> "TransitionRule":
        return cls(str(src), freeze({str(a): str(x) for a, x in guard.items()}), str(dst))


@dataclass(frozen=True)
class GameModel:
    states: tuple[State, ...]
    agents: tuple[Agent, ...]
    actions: tuple[Action, ...]
    indist: Mapping[Agent, tuple[frozenset, ...]]
    rules: tuple[TransitionRule, ...]
    valuation: Mapping[str, frozenset]
    _block_of: dict = field(init=False, repr=False, compare=False)
    _rules_from: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # agent -> state -> block id, identity partition for unlisted agents
        block_of = {}
        for a in self.agents:
            blocks = self.indist.get(a)
            if blocks is None:
                block_of[a] = {w: i for i, w in enumerate(self.states)}
            else:
                block_of[a] = {w: i for i, b in enumerate(blocks) for w in b}
        rules_from: dict[State, list[TransitionRule]] = {}
        for r in self.rules:
            rules_from.setdefault(r.src, []).append(r)
        object.__setattr__(self, "_block_of", block_of)
        object.__setattr__(self, "_rules_from", rules_from)

    @classmethod
    def build(cls, states, agents, actions, indist=None, rules=(), valuation=None):
        """Convenience constructor from plain Python containers."""
        indist = indist or {}
        valuation = valuation or {}
        return cls(
            states=tuple(str(w) for w in states),
            agents=tuple(str(a) for a in agents),
            actions=tuple(str(x) for x in actions),
            indist={
                str(a): tuple(frozenset(str(w) for w in b) for b in blocks)
                for a, blocks in indist.items()
            },
            rules=tuple(
                r if isinstance(r, TransitionRule) else TransitionRule.make(*r) for r in rules
            ),
            valuation={str(p): frozenset(str(w) for w in ws) for p, ws in valuation.items()},
        )

    @property
    def canonical_actions(self) -> list[Action]:
        return sorted(self.actions)

    def partition(self, agent: Agent) -> list[frozenset]:
        if agent not in self.agents:
            raise UnknownAgent(agent)
        if agent in self.indist:
            return list(self.indist[agent])
        return [frozenset([w]) for w in self.states]

    def same_block(self, agent: Agent, w: State, v: State) -> bool:
        table = self._block_of[agent]
        return table[w] == table[v]

    def rules_from(self, w: State) -> list[TransitionRule]:
        return self._rules_from.get(w, [])

    def check_state(self, w) -> State:
        w = str(w)
        if w not in self.states:
            raise UnknownState(w)
        return w


def validate_model(g: GameModel) -> list[str]:
    """One diagnostic string per violated invariant; empty means well-formed."""
    diags: list[str] = []

    def dupes(kind, items):
        seen = set()
        for x in items:
            if x in seen:
                diags.append(f"{kind}: duplicate entry {x!r}")
            seen.add(x)

    if not g.states:
        diags.append("states: must be non-empty")
    if not g.actions:
        diags.append("actions: must be non-empty")
    dupes("states", g.states)
    dupes("agents", g.agents)
    dupes("actions", g.actions)
    states, agents, actions = set(g.states), set(g.agents), set(g.actions)

    for a, blocks in g.indist.items():
        where = f"indist.{a}"
        if a not in agents:
            diags.append(f"{where}: undeclared agent {a!r}")
        owner: dict[State, int] = {}
        for i, block in enumerate(blocks):
            if not block:
                diags.append(f"{where}: block {i} is empty")
            for w in sorted(block):
                if w not in states:
                    diags.append(f"{where}: block {i} mentions undeclared state {w!r}")
                if w in owner:
                    diags.append(
                        f"{where}: blocks {owner[w]} and {i} overlap on state {w!r}"
                    )
                else:
                    owner[w] = i
        for w in g.states:
            if w not in owner:
                diags.append(f"{where}: state {w!r} is not covered by any block")

    for i, r in enumerate(g.rules):
        where = f"rules[{i}]"
        if r.src not in states:
            diags.append(f"{where}: undeclared state {r.src!r} in 'from'")
        if r.dst not in states:
            diags.append(f"{where}: undeclared state {r.dst!r} in 'to'")
        for a, x in r.guard:
            if a not in agents:
                diags.append(f"{where}: guard binds undeclared agent {a!r}")
            if x not in actions:
                diags.append(f"{where}: guard uses undeclared action {x!r}")

    for p, ws in g.valuation.items():
        for w in sorted(ws):
            if w not in states:
                diags.append(f"valuation.{p}: undeclared state {w!r}")
    return diags


def coalition_indist(g: GameModel, group: Iterable[Agent]) -> list[frozenset]:
    """Partition of the states by the intersection of the members' relations.

    The empty coalition yields the single block of all states.
    """
    group = sorted_agents(group)
    for a in group:
        if a not in g.agents:
            raise UnknownAgent(a)
    blocks: dict[tuple, list[State]] = {}
    for w in g.states:
        key = tuple(g._block_of[a][w] for a in group)
        blocks.setdefault(key, []).append(w)
    return [frozenset(b) for b in blocks.values()]


def block_of(g: GameModel, group: Iterable[Agent], w: State) -> list[State]:
    """States indistinguishable from ``w`` for the coalition, in declaration order."""
    group = list(group)
    return [v for v in g.states if all(g.same_block(a, w, v) for a in group)]


def matches(guard: Mapping[Agent, Action] | Profile, delta: Mapping[Agent, Action]) -> bool:
    """True iff ``delta`` agrees with ``guard`` on every agent the guard binds."""
    items = guard if isinstance(guard, tuple) else guard.items()
    return all(delta.get(a) == x for a, x in items)


def compatible(guard: Profile, fixed: Mapping[Agent, Action]) -> bool:
    """Guard and partial profile agree wherever both are defined."""
    for a, x in guard:
        y = fixed.get(a)
        if y is not None and y != x:
            return False
    return True


def profiles(agents: Iterable[Agent], actions: Iterable[Action]) -> Iterable[dict]:
    """All assignments agents -> actions in canonical order (one empty profile for no agents)."""
    agents = sorted_agents(agents)
    actions = sorted(actions)
    for combo in itertools.product(actions, repeat=len(agents)):
        yield dict(zip(agents, combo))


def successors(g: GameModel, w: State, fixed: Mapping[Agent, Action]) -> set:
    """All ``(delta, u)`` with ``delta`` total, extending ``fixed``, and ``(w, delta, u)`` in M.

    ``delta`` is returned in frozen (sorted tuple) form.
    """
    out = set()
    for rule in g.rules_from(w):
        if not compatible(rule.guard, fixed):
            continue
        base = dict(fixed)
        base.update(rule.guard)
        free = [a for a in g.agents if a not in base]
        for rest in profiles(free, g.actions):
            delta = {**base, **rest}
            out.add((freeze(delta), rule.dst))
    return out


def outcomes(g: GameModel, w: State, fixed: Mapping[Agent, Action]) -> dict[State, Profile]:
    """Reachable outcome states from ``w`` under any completion of ``fixed``.

    Each outcome comes with one witnessing complete profile (free agents take
    the canonically first action).  Equivalent to projecting
    :func:`successors` onto ``u`` without expanding the wildcards.
    """
    first = g.canonical_actions[0]
    out: dict[State, Profile] = {}
    for rule in g.rules_from(w):
        if rule.dst in out or not compatible(rule.guard, fixed):
            continue
        delta = {a: first for a in g.agents}
        delta.update(fixed)
        delta.update(rule.guard)
        out[rule.dst] = freeze(delta)
    return out


# -- serialization -----------------------------------------------------------


def model_to_dict(g: GameModel) -> dict:
    return {
        "states": list(g.states),
        "agents": list(g.agents),
        "actions": list(g.actions),
        "indist": {
            a: [sorted(b, key=g.states.index) for b in blocks] for a, blocks in g.indist.items()
        },
        "rules": [
            {"from": r.src, "guard": dict(r.guard), "to": r.dst} for r in g.rules
        ],
        "valuation": {p: sorted(ws, key=g.states.index) for p, ws in g.valuation.items()},
    }


def _as_list(value, where: str) -> list:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ModelError([f"{where}: expected a list"])
    return value


def model_from_dict(doc: Mapping) -> GameModel:
    if not isinstance(doc, Mapping):
        raise ModelError(["model: expected a mapping at top level"])
    unknown = set(doc) - {"states", "agents", "actions", "indist", "rules", "valuation"}
    if unknown:
        raise ModelError([f"model: unknown key {k!r}" for k in sorted(map(str, unknown))])
    rules = []
    for i, r in enumerate(_as_list(doc.get("rules"), "rules")):
        if not isinstance(r, Mapping) or not {"from", "to"} <= set(r):
            raise ModelError([f"rules[{i}]: expected a mapping with 'from', 'guard', 'to'"])
        guard = r.get("guard") or {}
        if not isinstance(guard, Mapping):
            raise ModelError([f"rules[{i}].guard: expected a mapping agent -> action"])
        rules.append(TransitionRule.make(r["from"], guard, r["to"]))
    indist = doc.get("indist") or {}
    valuation = doc.get("valuation") or {}
    if not isinstance(indist, Mapping) or not isinstance(valuation, Mapping):
        raise ModelError(["model: 'indist' and 'valuation' must be mappings"])
    return GameModel.build(
        states=_as_list(doc.get("states"), "states"),
        agents=_as_list(doc.get("agents"), "agents"),
        actions=_as_list(doc.get("actions"), "actions"),
        indist={a: _as_list(bs, f"indist.{a}") for a, bs in indist.items()},
        rules=rules,
        valuation={p: _as_list(ws, f"valuation.{p}") for p, ws in valuation.items()},
    )


def loads_model(text: str, validate: bool = True) -> GameModel:
    # BaseLoader keeps every scalar a string, so "1" and 1 name the same state
    try:
        doc = yaml.load(text, Loader=yaml.BaseLoader)
    except yaml.YAMLError as exc:
        raise ModelError([f"model: {exc}"]) from exc
    g = model_from_dict(doc)
    if validate:
        diags = validate_model(g)
        if diags:
            raise ModelError(diags)
    return g


def load_model(path: str | Path, validate: bool = True) -> GameModel:
    return loads_model(Path(path).read_text(encoding="utf-8"), validate=validate)


def dumps(doc) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, allow_unicode=True)


def dumps_model(g: GameModel) -> str:
    return dumps(model_to_dict(g))


# -- fixture ------------------------------------------------------------------


def atlantic() -> GameModel:
    """Convoy game: mines lie on route i in initial state i.

    From state i under profile (b, g, r) the convoy reaches ``s`` when its
    route b avoids both the U-boat (g) and the mines (i), else ``d``.
    British and Germans cannot tell the initial states apart; Russians can.
    """
    initial = ["1", "2", "3"]
    routes = ["1", "2", "3"]
    rules = []
    for i in initial:
        for b in routes:
            for g in routes:
                dst = "s" if b != g and b != i else "d"
                rules.append((i, {"British": b, "Germans": g}, dst))
    unknown = [initial, ["s"], ["d"]]
    return GameModel.build(
        states=initial + ["s", "d"],
        agents=["British", "Germans", "Russians"],
        actions=routes,
        indist={"British": unknown, "Germans": unknown},
        rules=rules,
        valuation={"saved": ["s"]},
    )
