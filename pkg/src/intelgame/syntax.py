"""Formulas of the knowledge / intelligence-power language.

The abstract syntax has exactly five node kinds: atoms, negation,
implication, distributed knowledge ``K_C`` and intelligence power
``[C]_B``.  Conjunction, disjunction, ``true`` and ``false`` only exist as
parser sugar (see :mod:`intelgame.parser`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

Agent = str
Coalition = frozenset  # frozenset[Agent]

#: atom reserved for the desugaring of ``true`` (``p0 -> p0``)
TRUTH_ATOM = "p0"

_IDENT = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_'.]*")


class DisjointnessViolation(ValueError):
    """An intelligence-power node whose actor and intel coalitions overlap."""

    def __init__(self, shared: Iterable[Agent]):
        self.shared = coalition(shared)
        super().__init__(
            "actor and intel coalitions must be disjoint; shared: "
            + fmt_coalition(self.shared)
        )


def coalition(members: Iterable[Agent] = ()) -> Coalition:
    members = frozenset(members)
    for m in members:
        if not isinstance(m, str) or not _IDENT.fullmatch(m):
            raise ValueError(f"invalid agent name {m!r}")
    return members


def sorted_agents(c: Iterable[Agent]) -> list[Agent]:
    """Canonical (lexicographic) member order."""
    return sorted(c)


def fmt_coalition(c: Iterable[Agent]) -> str:
    return "{" + ",".join(sorted_agents(c)) + "}"


class _Node:
    # Structural hash computed once; formulas are immutable trees.
    __slots__ = ()

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        from .parser import to_text

        return to_text(self)


@dataclass(frozen=True, eq=True)
class Atom(_Node):
    name: str
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.fullmatch(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")
        if self.name in ("true", "false"):
            raise ValueError(f"{self.name!r} is reserved")
        object.__setattr__(self, "_hash", hash(("Atom", self.name)))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Not(_Node):
    body: Formula
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("Not", self.body)))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Implies(_Node):
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("Implies", self.left, self.right)))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Knows(_Node):
    group: Coalition
    body: Formula
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "group", coalition(self.group))
        object.__setattr__(self, "_hash", hash(("Knows", self.group, self.body)))

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class IntelPower(_Node):
    """``[actor]_intel body``: knowing the moves of ``intel``, ``actor`` can force ``body``."""

    actor: Coalition
    intel: Coalition
    body: Formula
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "actor", coalition(self.actor))
        object.__setattr__(self, "intel", coalition(self.intel))
        shared = self.actor & self.intel
        if shared:
            raise DisjointnessViolation(shared)
        object.__setattr__(
            self, "_hash", hash(("IntelPower", self.actor, self.intel, self.body))
        )

    __hash__ = _Node.__hash__


Formula = Union[Atom, Not, Implies, Knows, IntelPower]


def mk_intel_power(actor: Iterable[Agent], intel: Iterable[Agent], body: Formula) -> IntelPower:
    """Build ``[actor]_intel body``; raises DisjointnessViolation on overlap."""
    return IntelPower(coalition(actor), coalition(intel), body)


# sugar used by the parser and by tests; never produces new node kinds

def top() -> Formula:
    p = Atom(TRUTH_ATOM)
    return Implies(p, p)


def bottom() -> Formula:
    return Not(top())


def conj(a: Formula, b: Formula) -> Formula:
    return Not(Implies(a, Not(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Implies(Not(a), b)


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, Atom):
        return ()
    if isinstance(phi, Implies):
        return (phi.left, phi.right)
    return (phi.body,)


def walk(phi: Formula) -> Iterator[Formula]:
    """Pre-order traversal, duplicates included."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def subformulas(phi: Formula) -> list[Formula]:
    """Distinct subformulas in post-order; the last element is ``phi`` itself."""
    seen: set[Formula] = set()
    out: list[Formula] = []

    def visit(node: Formula) -> None:
        if node in seen:
            return
        for child in children(node):
            visit(child)
        seen.add(node)
        out.append(node)

    visit(phi)
    return out


def size(phi: Formula) -> int:
    return sum(1 for _ in walk(phi))


def depth(phi: Formula) -> int:
    kids = children(phi)
    return 0 if not kids else 1 + max(depth(k) for k in kids)


def agents_of(phi: Formula) -> frozenset[Agent]:
    out: set[Agent] = set()
    for node in walk(phi):
        if isinstance(node, Knows):
            out |= node.group
        elif isinstance(node, IntelPower):
            out |= node.actor | node.intel
    return frozenset(out)


def atoms_of(phi: Formula) -> frozenset[str]:
    return frozenset(n.name for n in walk(phi) if isinstance(n, Atom))
