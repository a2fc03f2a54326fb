"""Hilbert-style proof checking.

Axioms are the nine schemas below plus every propositional tautology (with
modal subformulas read as opaque atoms).  Rules: modus ponens, epistemic
necessitation (``phi / K_C phi``) and strategic necessitation
(``phi / [C]_B phi``).

Proof scripts are line oriented::

    goal: [a]{c} p -> [a,b]{c} p
    1. p -> p                      ; taut
    2. [b]{c}(p -> p)              ; necS 1 {b}{c}
    3. ...                         ; ax:Cooperation
    4. ...                         ; mp 2 3

An axiom justification may carry a substitution witness, e.g.
``; ax:IntelMono ; C={a} ; B={c} ; B'={b,c} ; phi=p``, which is then checked
against the matched substitution.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .parser import ParseError, parse, to_text
from .syntax import (
    Atom,
    Formula,
    Implies,
    IntelPower,
    Knows,
    Not,
    fmt_coalition,
    walk,
)

MAX_TAUTOLOGY_ATOMS = 20


class Schema(enum.Enum):
    Truth = "Truth"
    Distributivity = "Distributivity"
    NegIntrospection = "NegIntrospection"
    EpistemicMono = "EpistemicMono"
    StrategicIntrospection = "StrategicIntrospection"
    EmptyCoalition = "EmptyCoalition"
    Cooperation = "Cooperation"
    IntelMono = "IntelMono"
    NoneToAnalyze = "NoneToAnalyze"


#: metavariables of each schema; upper case are coalitions, lower case formulas
METAVARS = {
    Schema.Truth: ("C", "phi"),
    Schema.Distributivity: ("C", "phi", "psi"),
    Schema.NegIntrospection: ("C", "phi"),
    Schema.EpistemicMono: ("C", "D", "phi"),
    Schema.StrategicIntrospection: ("C", "B", "phi"),
    Schema.EmptyCoalition: ("phi",),
    Schema.Cooperation: ("B", "C", "D", "phi", "psi"),
    Schema.IntelMono: ("C", "B", "B'", "phi"),
    Schema.NoneToAnalyze: ("B", "phi"),
}


class SchemaMismatch(ValueError):
    """A formula is not an instance of the requested schema (or violates its side condition)."""


class AtomBudgetExceeded(ValueError):
    pass


def _is_coalition_var(name: str) -> bool:
    return name[0].isupper()


def instantiate(schema: Schema, s: dict) -> Formula:
    """Build the schema instance for substitution ``s``.

    Side conditions are not checked here; construction of an intelligence
    node still rejects overlapping coalitions.
    """
    E = frozenset()
    if schema is Schema.Truth:
        return Implies(Knows(s["C"], s["phi"]), s["phi"])
    if schema is Schema.Distributivity:
        C, phi, psi = s["C"], s["phi"], s["psi"]
        return Implies(Knows(C, Implies(phi, psi)), Implies(Knows(C, phi), Knows(C, psi)))
    if schema is Schema.NegIntrospection:
        C, phi = s["C"], s["phi"]
        return Implies(Not(Knows(C, phi)), Knows(C, Not(Knows(C, phi))))
    if schema is Schema.EpistemicMono:
        return Implies(Knows(s["C"], s["phi"]), Knows(s["D"], s["phi"]))
    if schema is Schema.StrategicIntrospection:
        node = IntelPower(s["C"], s["B"], s["phi"])
        return Implies(node, Knows(s["C"], node))
    if schema is Schema.EmptyCoalition:
        return Implies(Knows(E, s["phi"]), IntelPower(E, E, s["phi"]))
    if schema is Schema.Cooperation:
        B, C, D, phi, psi = s["B"], s["C"], s["D"], s["phi"], s["psi"]
        return Implies(
            IntelPower(C, B, Implies(phi, psi)),
            Implies(IntelPower(D, B | C, phi), IntelPower(C | D, B, psi)),
        )
    if schema is Schema.IntelMono:
        return Implies(IntelPower(s["C"], s["B"], s["phi"]), IntelPower(s["C"], s["B'"], s["phi"]))
    if schema is Schema.NoneToAnalyze:
        return Implies(IntelPower(E, s["B"], s["phi"]), IntelPower(E, E, s["phi"]))
    raise ValueError(schema)


def _split(phi: Formula, what: str) -> tuple[Formula, Formula]:
    if not isinstance(phi, Implies):
        raise SchemaMismatch(f"{what} must be an implication")
    return phi.left, phi.right


def _expect(node: Formula, kind, what: str):
    if not isinstance(node, kind):
        raise SchemaMismatch(f"{what} must be a {kind.__name__} formula")
    return node


def _same(a, b, what: str) -> None:
    if a != b:
        shown = [fmt_coalition(x) if isinstance(x, frozenset) else to_text(x) for x in (a, b)]
        raise SchemaMismatch(f"{what}: {shown[0]} differs from {shown[1]}")


def match_axiom(schema: Schema, phi: Formula) -> dict:
    """Recover the substitution under which ``phi`` instantiates ``schema``.

    Raises SchemaMismatch describing the first mismatch, including failed
    side conditions.
    """
    schema = Schema(schema)
    left, right = _split(phi, "formula")
    E = frozenset()

    if schema is Schema.Truth:
        k = _expect(left, Knows, "antecedent")
        _same(k.body, right, "consequent vs known formula")
        return {"C": k.group, "phi": right}

    if schema is Schema.Distributivity:
        k1 = _expect(left, Knows, "antecedent")
        imp = _expect(k1.body, Implies, "known formula")
        k2_raw, k3_raw = _split(right, "consequent")
        k2 = _expect(k2_raw, Knows, "middle antecedent")
        k3 = _expect(k3_raw, Knows, "final consequent")
        _same(k2.group, k1.group, "coalition")
        _same(k3.group, k1.group, "coalition")
        _same(k2.body, imp.left, "premise formula")
        _same(k3.body, imp.right, "conclusion formula")
        return {"C": k1.group, "phi": imp.left, "psi": imp.right}

    if schema is Schema.NegIntrospection:
        k = _expect(_expect(left, Not, "antecedent").body, Knows, "negated antecedent")
        outer = _expect(right, Knows, "consequent")
        _same(outer.group, k.group, "coalition")
        _same(outer.body, Not(k), "consequent body")
        return {"C": k.group, "phi": k.body}

    if schema is Schema.EpistemicMono:
        k1 = _expect(left, Knows, "antecedent")
        k2 = _expect(right, Knows, "consequent")
        _same(k2.body, k1.body, "known formula")
        if not k1.group <= k2.group:
            raise SchemaMismatch(
                f"side condition C <= D fails: {fmt_coalition(k1.group)} not within {fmt_coalition(k2.group)}"
            )
        return {"C": k1.group, "D": k2.group, "phi": k1.body}

    if schema is Schema.StrategicIntrospection:
        s = _expect(left, IntelPower, "antecedent")
        k = _expect(right, Knows, "consequent")
        _same(k.group, s.actor, "knowing coalition vs acting coalition")
        _same(k.body, s, "known formula")
        return {"C": s.actor, "B": s.intel, "phi": s.body}

    if schema is Schema.EmptyCoalition:
        k = _expect(left, Knows, "antecedent")
        s = _expect(right, IntelPower, "consequent")
        _same(k.group, E, "knowing coalition")
        _same(s.actor, E, "acting coalition")
        _same(s.intel, E, "intel coalition")
        _same(s.body, k.body, "body")
        return {"phi": k.body}

    if schema is Schema.Cooperation:
        first = _expect(left, IntelPower, "antecedent")
        imp = _expect(first.body, Implies, "antecedent body")
        second_raw, third_raw = _split(right, "consequent")
        second = _expect(second_raw, IntelPower, "middle antecedent")
        third = _expect(third_raw, IntelPower, "final consequent")
        B, C, D = first.intel, first.actor, second.actor
        if B & D or C & D:
            raise SchemaMismatch(
                f"side condition fails: B={fmt_coalition(B)}, C={fmt_coalition(C)}, "
                f"D={fmt_coalition(D)} are not pairwise disjoint"
            )
        _same(second.intel, B | C, "middle intel coalition vs B,C")
        _same(second.body, imp.left, "middle body")
        _same(third.actor, C | D, "final acting coalition vs C,D")
        _same(third.intel, B, "final intel coalition")
        _same(third.body, imp.right, "final body")
        return {"B": B, "C": C, "D": D, "phi": imp.left, "psi": imp.right}

    if schema is Schema.IntelMono:
        s1 = _expect(left, IntelPower, "antecedent")
        s2 = _expect(right, IntelPower, "consequent")
        _same(s2.actor, s1.actor, "acting coalition")
        _same(s2.body, s1.body, "body")
        if not s1.intel <= s2.intel:
            raise SchemaMismatch(
                f"side condition B <= B' fails: {fmt_coalition(s1.intel)} not within {fmt_coalition(s2.intel)}"
            )
        return {"C": s1.actor, "B": s1.intel, "B'": s2.intel, "phi": s1.body}

    if schema is Schema.NoneToAnalyze:
        s1 = _expect(left, IntelPower, "antecedent")
        s2 = _expect(right, IntelPower, "consequent")
        _same(s1.actor, E, "acting coalition")
        _same(s2.actor, E, "acting coalition")
        _same(s2.intel, E, "intel coalition")
        _same(s2.body, s1.body, "body")
        return {"B": s1.intel, "phi": s1.body}

    raise ValueError(schema)


# -- tautologies ----------------------------------------------------------------


def propositional_atoms(phi: Formula) -> list[Formula]:
    """Variables and maximal modal subformulas, in first-occurrence order."""
    out: dict[Formula, None] = {}
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, (Atom, Knows, IntelPower)):
            out.setdefault(node)
        elif isinstance(node, Not):
            stack.append(node.body)
        else:
            stack.extend([node.right, node.left])
    return list(out)


def is_tautology(phi: Formula, max_atoms: int = MAX_TAUTOLOGY_ATOMS) -> bool:
    """Truth-table check, all rows at once: each atom is a bitmask over the 2^k rows."""
    atoms = propositional_atoms(phi)
    k = len(atoms)
    if k > max_atoms:
        raise AtomBudgetExceeded(f"{k} propositional atoms exceed the budget of {max_atoms}")
    rows = 1 << k
    full = (1 << rows) - 1
    column = {}
    for i, a in enumerate(atoms):
        # bit r of the mask is the value of atom i in row r: runs of 2^i zeros then 2^i ones
        half = 1 << i
        mask = ((1 << half) - 1) << half
        width = 2 * half
        while width < rows:
            mask |= mask << width
            width *= 2
        column[a] = mask

    def ev(node: Formula) -> int:
        hit = column.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Not):
            return full & ~ev(node.body)
        return (full & ~ev(node.left)) | ev(node.right)

    return ev(phi) == full


# -- scripts --------------------------------------------------------------------


@dataclass(frozen=True)
class Axiom:
    schema: Schema
    witness: Optional[dict] = None


@dataclass(frozen=True)
class Tautology:
    pass


@dataclass(frozen=True)
class MP:
    premise: int
    implication: int


@dataclass(frozen=True)
class NecK:
    line: int
    group: frozenset


@dataclass(frozen=True)
class NecS:
    line: int
    actor: frozenset
    intel: frozenset


Justification = Union[Axiom, Tautology, MP, NecK, NecS]


@dataclass(frozen=True)
class ProofLine:
    index: int
    formula: Formula
    justification: Justification


@dataclass
class ProofScript:
    goal: Formula
    lines: list[ProofLine]


@dataclass
class LineVerdict:
    index: int
    ok: bool
    error: Optional[str] = None


@dataclass
class Verdict:
    lines: list[LineVerdict] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)  # script-level problems

    @property
    def ok(self) -> bool:
        return not self.errors and all(v.ok for v in self.lines)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "errors": list(self.errors),
            "lines": [
                {"index": v.index, "status": "OK" if v.ok else "ERROR", **({"error": v.error} if v.error else {})}
                for v in self.lines
            ],
        }


class ScriptError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _check_line(line: ProofLine, earlier: dict[int, Formula]) -> None:
    """Raise ValueError with a reason if the line is not justified."""
    j = line.justification
    phi = line.formula

    def ref(i: int) -> Formula:
        if i >= line.index or i not in earlier:
            raise ValueError(f"bad reference to line {i}: must be an earlier line")
        return earlier[i]

    if isinstance(j, Tautology):
        if not is_tautology(phi):
            raise ValueError("not a propositional tautology")
    elif isinstance(j, Axiom):
        try:
            subst = match_axiom(j.schema, phi)
        except SchemaMismatch as exc:
            raise ValueError(f"not an instance of {j.schema.value}: {exc}") from None
        for key, value in (j.witness or {}).items():
            if key not in subst:
                raise ValueError(f"{j.schema.value} has no metavariable {key!r}")
            if subst[key] != value:
                raise ValueError(f"substitution witness disagrees on {key}")
    elif isinstance(j, MP):
        premise, implication = ref(j.premise), ref(j.implication)
        if implication != Implies(premise, phi):
            raise ValueError(
                f"modus ponens shape: line {j.implication} is not line {j.premise} -> this formula"
            )
    elif isinstance(j, NecK):
        if phi != Knows(j.group, ref(j.line)):
            raise ValueError(
                f"necK shape: expected K{fmt_coalition(j.group)} applied to line {j.line}"
            )
    elif isinstance(j, NecS):
        if j.actor & j.intel:
            raise ValueError("necS coalitions must be disjoint")
        body = ref(j.line)
        if phi != IntelPower(j.actor, j.intel, body):
            raise ValueError(
                f"necS shape: expected [{','.join(sorted(j.actor))}]{fmt_coalition(j.intel)} "
                f"applied to line {j.line}"
            )
    else:
        raise TypeError(j)


def check_proof(script: ProofScript) -> Verdict:
    verdict = Verdict()
    earlier: dict[int, Formula] = {}
    last_index = 0
    for line in script.lines:
        try:
            if line.index <= last_index:
                raise ValueError(f"line numbers must increase (previous was {last_index})")
            _check_line(line, earlier)
        except ValueError as exc:
            verdict.lines.append(LineVerdict(line.index, False, str(exc)))
        else:
            verdict.lines.append(LineVerdict(line.index, True))
        # failed lines stay unusable as references
        if verdict.lines[-1].ok:
            earlier[line.index] = line.formula
        last_index = max(last_index, line.index)
    if not script.lines:
        verdict.errors.append("empty proof")
    elif script.lines[-1].formula != script.goal:
        verdict.errors.append("last line does not prove the goal")
    return verdict


# -- script text format ---------------------------------------------------------

_LINE = re.compile(r"^\s*(\d+)\s*\.\s*(.*)$")
_AGENTS = r"\{\s*([^{}]*)\s*\}"


def _agents(text: str) -> frozenset:
    return frozenset(a.strip() for a in text.split(",") if a.strip())


def _justification(text: str, lineno: int) -> Justification:
    parts = [p.strip() for p in text.split(";")]
    head = parts[0]
    extras = parts[1:]
    if head == "taut":
        just = Tautology()
    elif head.startswith("ax:"):
        try:
            schema = Schema(head[3:].strip())
        except ValueError:
            raise ScriptError(f"unknown axiom schema {head[3:].strip()!r}", lineno) from None
        witness = {}
        for item in extras:
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in METAVARS[schema]:
                raise ScriptError(f"bad substitution entry {item!r}", lineno)
            if _is_coalition_var(key):
                m = re.fullmatch(_AGENTS, value.strip())
                if not m:
                    raise ScriptError(f"expected {{agents}} for {key}", lineno)
                witness[key] = _agents(m.group(1))
            else:
                try:
                    witness[key] = parse(value)
                except ParseError as exc:
                    raise ScriptError(f"in substitution for {key}: {exc}", lineno) from None
        return Axiom(schema, witness or None)
    elif m := re.fullmatch(r"mp\s+(\d+)\s+(\d+)", head):
        just = MP(int(m.group(1)), int(m.group(2)))
    elif m := re.fullmatch(r"necK\s+(\d+)\s*" + _AGENTS, head):
        just = NecK(int(m.group(1)), _agents(m.group(2)))
    elif m := re.fullmatch(r"necS\s+(\d+)\s*" + _AGENTS + r"\s*" + _AGENTS, head):
        just = NecS(int(m.group(1)), _agents(m.group(2)), _agents(m.group(3)))
    else:
        raise ScriptError(f"unrecognized justification {head!r}", lineno)
    if extras:
        raise ScriptError("only axiom justifications take extra fields", lineno)
    return just


def parse_script(text: str) -> ProofScript:
    """Parse the line-oriented script format; ``#`` starts a comment line."""
    goal = None
    lines: list[ProofLine] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            if stripped.startswith("goal:"):
                goal = parse(stripped[5:])
                continue
            m = _LINE.match(stripped)
            if not m:
                raise ScriptError("expected 'n. <formula> ; <justification>'", lineno)
            body, sep, just = m.group(2).partition(";")
            if not sep:
                raise ScriptError("missing ';' before justification", lineno)
            lines.append(ProofLine(int(m.group(1)), parse(body), _justification(just, lineno)))
        except ParseError as exc:
            raise ScriptError(str(exc), lineno) from None
    if goal is None:
        if not lines:
            raise ScriptError("empty script", 0)
        goal = lines[-1].formula
    return ProofScript(goal, lines)


def load_script(path: str | Path) -> ProofScript:
    return parse_script(Path(path).read_text(encoding="utf-8"))


def _just_text(j: Justification) -> str:
    def agents(c):
        return "{" + ",".join(sorted(c)) + "}"

    if isinstance(j, Tautology):
        return "taut"
    if isinstance(j, Axiom):
        text = f"ax:{j.schema.value}"
        for key, value in (j.witness or {}).items():
            shown = agents(value) if isinstance(value, frozenset) else to_text(value)
            text += f" ; {key}={shown}"
        return text
    if isinstance(j, MP):
        return f"mp {j.premise} {j.implication}"
    if isinstance(j, NecK):
        return f"necK {j.line} {agents(j.group)}"
    return f"necS {j.line} {agents(j.actor)}{agents(j.intel)}"


def format_script(script: ProofScript) -> str:
    out = [f"goal: {to_text(script.goal)}"]
    for line in script.lines:
        out.append(f"{line.index}. {to_text(line.formula)} ; {_just_text(line.justification)}")
    return "\n".join(out) + "\n"


# -- mutation -------------------------------------------------------------------


def _formula_mutations(phi: Formula) -> list[Formula]:
    """Small syntactic perturbations of a formula, each different from it."""
    out = [Not(phi)]
    if isinstance(phi, Not):
        out.append(phi.body)
    if isinstance(phi, Implies):
        out.append(phi.left)
        out.append(phi.right)
        if phi.left != phi.right:
            out.append(Implies(phi.right, phi.left))
    if isinstance(phi, Knows):
        out.append(Knows(phi.group | {"zz"}, phi.body))
        out.append(phi.body)
    if isinstance(phi, IntelPower):
        out.append(IntelPower(phi.actor | {"zz"}, phi.intel, phi.body))
        out.append(IntelPower(phi.actor, phi.intel | {"zz"}, phi.body))
    renamed = _rename_atom(phi)
    if renamed != phi:
        out.append(renamed)
    return [m for m in out if m != phi]


def _rename_atom(phi: Formula) -> Formula:
    names = sorted({n.name for n in walk(phi) if isinstance(n, Atom)})
    if not names:
        return phi
    target = names[0]

    def go(f):
        if isinstance(f, Atom):
            return Atom(f.name + "_x") if f.name == target else f
        if isinstance(f, Not):
            return Not(go(f.body))
        if isinstance(f, Implies):
            return Implies(go(f.left), go(f.right))
        if isinstance(f, Knows):
            return Knows(f.group, go(f.body))
        return IntelPower(f.actor, f.intel, go(f.body))

    return go(phi)


def _justification_mutations(line: ProofLine, indices: list[int]) -> list[Justification]:
    j = line.justification
    out: list[Justification] = []
    if isinstance(j, MP):
        out.append(MP(j.implication, j.premise))
        for i in indices:
            if i < line.index and i != j.premise:
                out.append(MP(i, j.implication))
                break
    elif isinstance(j, NecK):
        out.append(NecK(j.line, j.group | {"zz"}))
    elif isinstance(j, NecS):
        out.append(NecS(j.line, j.actor | {"zz"}, j.intel))
        if j.actor:
            out.append(NecS(j.line, j.actor, j.intel | {min(j.actor)}))
        out.append(NecS(j.line, j.intel, j.actor))
    elif isinstance(j, Axiom):
        for other in Schema:
            if other is not j.schema:
                out.append(Axiom(other))
                break
        out.append(Tautology())
    elif isinstance(j, Tautology):
        out.append(Axiom(Schema.Truth))
    return [m for m in out if m != j]


def mutants(script: ProofScript) -> list[tuple[str, ProofScript]]:
    """Single-line mutations of a script: deletion, formula edits, justification edits,
    and swaps of adjacent lines that make a reference point forward."""
    out: list[tuple[str, ProofScript]] = []
    lines = script.lines
    indices = [ln.index for ln in lines]
    for k, line in enumerate(lines):
        out.append((f"delete line {line.index}", ProofScript(script.goal, lines[:k] + lines[k + 1 :])))
        for m in _formula_mutations(line.formula):
            new = ProofLine(line.index, m, line.justification)
            out.append(
                (f"line {line.index} formula -> {to_text(m)}", ProofScript(script.goal, lines[:k] + [new] + lines[k + 1 :]))
            )
        for jm in _justification_mutations(line, indices):
            new = ProofLine(line.index, line.formula, jm)
            out.append(
                (f"line {line.index} justification -> {_just_text(jm)}", ProofScript(script.goal, lines[:k] + [new] + lines[k + 1 :]))
            )
    for k in range(len(lines) - 1):
        a, b = lines[k], lines[k + 1]
        if a.index in _refs(b.justification):
            # renumber so the swapped order keeps increasing indices but the reference points forward
            swapped = [
                ProofLine(a.index, b.formula, _retarget(b.justification, a.index, b.index)),
                ProofLine(b.index, a.formula, a.justification),
            ]
            out.append((f"swap lines {a.index} and {b.index}", ProofScript(script.goal, lines[:k] + swapped + lines[k + 2 :])))
    return out


def _refs(j: Justification) -> tuple[int, ...]:
    if isinstance(j, MP):
        return (j.premise, j.implication)
    if isinstance(j, (NecK, NecS)):
        return (j.line,)
    return ()


def _retarget(j: Justification, old: int, new: int) -> Justification:
    def fix(i):
        return new if i == old else i

    if isinstance(j, MP):
        return MP(fix(j.premise), fix(j.implication))
    if isinstance(j, NecK):
        return NecK(fix(j.line), j.group)
    if isinstance(j, NecS):
        return NecS(fix(j.line), j.actor, j.intel)
    return j
