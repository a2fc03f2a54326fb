"""Concrete syntax: a small recursive-descent parser and a printer.

Grammar (loosest to tightest)::

    formula := disj ("->" formula)?          right-associative
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary
             | "K" "{" agents? "}" unary
             | "[" agents? "]" "{" agents? "}" unary
             | atom | "true" | "false" | "(" formula ")"

``K`` is only a keyword when immediately followed by ``{``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    Atom,
    Formula,
    Implies,
    IntelPower,
    Knows,
    Not,
    bottom,
    conj,
    disj,
    mk_intel_power,
    sorted_agents,
    top,
)

KEYWORDS = {"true", "false"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_'.]*)
  | (?P<punct>[!&|(){}\[\],])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> _Tok:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise ParseError(f"{message}, found {found}", self.text, tok.pos)

    def expect(self, value: str) -> _Tok:
        tok = self.peek()
        if tok.value != value or tok.kind not in ("punct", "arrow"):
            self.error(f"expected {value!r}")
        return self.next()

    def parse(self) -> Formula:
        phi = self.formula()
        if self.peek().kind != "eof":
            self.error("unexpected trailing input")
        return phi

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "arrow":
            self.next()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while self.peek().value == "|" and self.peek().kind == "punct":
            self.next()
            phi = disj(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while self.peek().value == "&" and self.peek().kind == "punct":
            self.next()
            phi = conj(phi, self.unary())
        return phi

    def agents(self, close: str) -> list[str]:
        names = []
        if self.peek().value == close:
            return names
        while True:
            tok = self.peek()
            if tok.kind != "ident":
                self.error("expected agent name")
            names.append(self.next().value)
            if self.peek().value == ",":
                self.next()
                continue
            return names

    def braced(self) -> list[str]:
        self.expect("{")
        names = self.agents("}")
        self.expect("}")
        return names

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "punct":
            if tok.value == "!":
                self.next()
                return Not(self.unary())
            if tok.value == "(":
                self.next()
                phi = self.formula()
                self.expect(")")
                return phi
            if tok.value == "[":
                self.next()
                actor = self.agents("]")
                self.expect("]")
                intel = self.braced()
                body = self.unary()
                # DisjointnessViolation reported at the opening bracket
                try:
                    return mk_intel_power(actor, intel, body)
                except ValueError as exc:
                    raise ParseError(str(exc), self.text, tok.pos) from exc
        if tok.kind == "ident":
            if tok.value == "K" and self.peek(1).value == "{":
                self.next()
                group = self.braced()
                return Knows(frozenset(group), self.unary())
            self.next()
            if tok.value == "true":
                return top()
            if tok.value == "false":
                return bottom()
            return Atom(tok.value)
        self.error("expected a formula")


def parse(text: str) -> Formula:
    """Parse concrete syntax into a (desugared) Formula."""
    return _Parser(text).parse()


def _agents_text(c) -> str:
    return ",".join(sorted_agents(c))


def to_text(phi: Formula) -> str:
    """Print with minimal parentheses; ``parse(to_text(phi)) == phi``."""
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Implies):
        left = to_text(phi.left)
        if isinstance(phi.left, Implies):
            left = f"({left})"
        return f"{left} -> {to_text(phi.right)}"
    body = to_text(phi.body)
    if isinstance(phi.body, Implies):
        body = f"({body})"
    if isinstance(phi, Not):
        return "!" + body
    if isinstance(phi, Knows):
        return f"K{{{_agents_text(phi.group)}}}{_sep(body)}{body}"
    if isinstance(phi, IntelPower):
        return f"[{_agents_text(phi.actor)}]{{{_agents_text(phi.intel)}}}{_sep(body)}{body}"
    raise TypeError(f"not a formula: {phi!r}")


def _sep(body: str) -> str:
    return " " if body[:1].isalnum() or body[:1] == "_" else ""
