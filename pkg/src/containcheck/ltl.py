"""Temporal formulas over node-name atoms: AST, parser, renderer, and the
compilation of an acyclic behavior model into its property set.

Five templates drive generation, one per control-flow construct:

    sequence   G (A1 -> F A2)
    fork       G (A -> F B1 & F B2 & ... & F Bn)
    join       (G (A1 & A2 & ... & An) -> F B)
    decision   G (A -> F B1 xor F B2 xor ... xor F Bn)
    merge      G (A1 | A2 | ... | An -> F B)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import ActivityModel, NodeKind, is_acyclic, validate


class Formula:
    """Base class for formula nodes; all subclasses are frozen and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Xor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


_UNARY = {Not: "!", Always: "G", Eventually: "F", Next: "X"}

#: Binding strength, tightest first: unary, &, |, xor, ->.
_PRECEDENCE = {And: 4, Or: 3, Xor: 2, Implies: 1}

#: Reserved words that cannot double as atoms in rendered formulas.
RESERVED_ATOMS = frozenset({"G", "F", "X", "U", "R", "xor", "TRUE", "FALSE"})


def atoms(formula: Formula) -> set[str]:
    """All atom names occurring in the formula."""
    if isinstance(formula, Atom):
        return {formula.name}
    if isinstance(formula, (Not, Always, Eventually, Next)):
        return atoms(formula.operand)
    if isinstance(formula, (And, Or, Xor, Implies)):
        return atoms(formula.left) | atoms(formula.right)
    return set()


def conjoin(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjoin(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def xor_chain(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Xor(out, p)
    return out


def render_formula(formula: Formula) -> str:
    """Render with minimal parenthesization under the parser's precedence.

    A top-level implication is wrapped in parentheses, matching the join
    template's surface shape.
    """
    text = _render(formula)
    if isinstance(formula, Implies):
        return f"({text})"
    return text


def _render(f: Formula, parent_level: int = 0) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueConst):
        return "TRUE"
    if isinstance(f, FalseConst):
        return "FALSE"
    if type(f) in _UNARY:
        op = _UNARY[type(f)]
        inner = f.operand
        if isinstance(inner, (And, Or, Xor, Implies)):
            return f"{op} ({_render(inner)})"
        sep = "" if isinstance(f, Not) else " "
        return f"{op}{sep}{_render(inner, parent_level=5)}"
    level = _PRECEDENCE[type(f)]
    op = {And: "&", Or: "|", Xor: "xor", Implies: "->"}[type(f)]
    # Left child of a left-associative chain keeps the same level bare; the
    # right child needs parens at equal level. Implication associates right.
    if isinstance(f, Implies):
        left = _render(f.left, level + 1)
        right = _render(f.right, level)
    else:
        left = _render(f.left, level)
        right = _render(f.right, level + 1)
    text = f"{left} {op} {right}"
    if level < parent_level:
        return f"({text})"
    return text


class LtlSyntaxError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


def parse_ltl(text: str) -> Formula:
    """Parse a formula with precedence unary > & > | > xor > -> and a
    right-associative implication."""
    return _LtlParser(text).parse()


class _LtlParser:
    def __init__(self, text: str):
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text: str) -> list[tuple[str, int, int]]:
        tokens = []
        line, col, i = 1, 1, 0
        while i < len(text):
            ch = text[i]
            if ch == "\n":
                line, col = line + 1, 1
                i += 1
                continue
            if ch in " \t\r":
                i += 1
                col += 1
                continue
            if text.startswith("->", i):
                tokens.append(("->", line, col))
                i += 2
                col += 2
                continue
            if ch in "()!&|":
                tokens.append((ch, line, col))
                i += 1
                col += 1
                continue
            if ch.isalnum() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                tokens.append((text[i:j], line, col))
                col += j - i
                i = j
                continue
            raise LtlSyntaxError(f"unexpected character {ch!r}", line, col)
        tokens.append(("", line, col))
        return tokens

    def peek(self) -> str:
        return self.tokens[self.pos][0]

    def take(self) -> str:
        tok = self.tokens[self.pos]
        if tok[0]:
            self.pos += 1
        return tok[0]

    def error(self, message: str):
        _, line, col = self.tokens[self.pos]
        raise LtlSyntaxError(message, line, col)

    def parse(self) -> Formula:
        f = self.parse_implies()
        if self.peek():
            self.error(f"unexpected token {self.peek()!r}")
        return f

    def parse_implies(self) -> Formula:
        left = self.parse_xor()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.parse_implies())
        return left

    def parse_xor(self) -> Formula:
        out = self.parse_or()
        while self.peek() == "xor":
            self.take()
            out = Xor(out, self.parse_or())
        return out

    def parse_or(self) -> Formula:
        out = self.parse_and()
        while self.peek() == "|":
            self.take()
            out = Or(out, self.parse_and())
        return out

    def parse_and(self) -> Formula:
        out = self.parse_unary()
        while self.peek() == "&":
            self.take()
            out = And(out, self.parse_unary())
        return out

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.parse_unary())
        if tok in ("G", "F", "X"):
            self.take()
            cls = {"G": Always, "F": Eventually, "X": Next}[tok]
            return cls(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.parse_implies()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return f
        if tok == "TRUE":
            self.take()
            return TrueConst()
        if tok == "FALSE":
            self.take()
            return FalseConst()
        if tok and (tok[0].isalpha() or tok[0] == "_") and tok not in RESERVED_ATOMS:
            self.take()
            return Atom(tok)
        self.error(f"expected a formula, got {tok or 'end of input'!r}")


class Primitive(Enum):
    SEQUENCE = "sequence"
    FORK = "fork"
    JOIN = "join"
    DECISION = "decision"
    MERGE = "merge"


@dataclass(frozen=True)
class GeneratedProperty:
    formula: Formula
    origin: str  # node id that induced the property
    primitive: Primitive


class GenerationError(Exception):
    pass


def generate_properties(
    model: ActivityModel, join_mode: str = "always"
) -> list[GeneratedProperty]:
    """Compile a valid acyclic model into its ordered property list.

    One property is emitted per direct edge between non-structural nodes
    (sequence) and one per structural node (its template). Structural nodes
    are transparent: template endpoints resolve through chained structural
    nodes to the nearest non-structural ones. Emission order follows a
    depth-first walk from the initial node along declaration-ordered edges,
    so identical input text always yields the identical property list.

    join_mode selects the join template: "always" keeps the whole antecedent
    conjunction under G, which is unsatisfiable under pulse semantics and
    renders such properties vacuously true; "simultaneous" moves G outward,
    G ((A1 & ... & An) -> F B), demanding the inputs pulse together.
    """
    if join_mode not in ("always", "simultaneous"):
        raise ValueError(f"unknown join mode {join_mode!r}")
    problems = validate(model)
    if problems:
        raise GenerationError(
            "model is not well formed: " + "; ".join(str(p) for p in problems)
        )
    if not is_acyclic(model):
        raise GenerationError("loops unsupported in high-level models")
    bad = sorted(n.id for n in model.nodes if n.id in RESERVED_ATOMS)
    if bad:
        raise GenerationError(
            "node ids collide with reserved formula tokens: " + ", ".join(bad)
        )

    nodes = {n.id: n for n in model.nodes}

    def is_structural(node_id: str) -> bool:
        return nodes[node_id].structural

    def resolve_forward(node_id: str) -> list[str]:
        if not is_structural(node_id):
            return [node_id]
        out: list[str] = []
        for e in model.outgoing(node_id):
            for r in resolve_forward(e.target):
                if r not in out:
                    out.append(r)
        return out

    def resolve_backward(node_id: str) -> list[str]:
        if not is_structural(node_id):
            return [node_id]
        out: list[str] = []
        for e in model.incoming(node_id):
            for r in resolve_backward(e.source):
                if r not in out:
                    out.append(r)
        return out

    def incoming_sources(node_id: str) -> list[str]:
        sources: list[str] = []
        for e in model.incoming(node_id):
            for r in resolve_backward(e.source):
                if r not in sources:
                    sources.append(r)
        return sources

    def antecedent(node_id: str) -> Formula:
        return conjoin([Atom(s) for s in incoming_sources(node_id)])

    def branch_targets(node_id: str) -> list[str]:
        out: list[str] = []
        for e in model.outgoing(node_id):
            for r in resolve_forward(e.target):
                if r not in out:
                    out.append(r)
        return out

    def structural_property(node_id: str) -> GeneratedProperty:
        kind = nodes[node_id].kind
        if kind is NodeKind.FORK:
            f = Always(
                Implies(antecedent(node_id), conjoin([Eventually(Atom(b)) for b in branch_targets(node_id)]))
            )
            return GeneratedProperty(f, node_id, Primitive.FORK)
        if kind is NodeKind.DECISION:
            f = Always(
                Implies(antecedent(node_id), xor_chain([Eventually(Atom(b)) for b in branch_targets(node_id)]))
            )
            return GeneratedProperty(f, node_id, Primitive.DECISION)
        if kind is NodeKind.JOIN:
            inputs = conjoin([Atom(s) for s in incoming_sources(node_id)])
            follow = conjoin([Eventually(Atom(b)) for b in branch_targets(node_id)])
            if join_mode == "always":
                f: Formula = Implies(Always(inputs), follow)
            else:
                f = Always(Implies(inputs, follow))
            return GeneratedProperty(f, node_id, Primitive.JOIN)
        # merge
        sources = disjoin([Atom(s) for s in incoming_sources(node_id)])
        follow = conjoin([Eventually(Atom(b)) for b in branch_targets(node_id)])
        return GeneratedProperty(Always(Implies(sources, follow)), node_id, Primitive.MERGE)

    properties: list[GeneratedProperty] = []
    emitted: set[str] = set()
    visited: set[str] = set()
    initial = next(n for n in model.nodes if n.kind is NodeKind.INITIAL)

    def visit(node_id: str) -> None:
        visited.add(node_id)
        for e in model.outgoing(node_id):
            if is_structural(e.target):
                if e.target not in emitted:
                    emitted.add(e.target)
                    properties.append(structural_property(e.target))
            elif not is_structural(node_id):
                properties.append(
                    GeneratedProperty(
                        Always(Implies(Atom(e.source), Eventually(Atom(e.target)))),
                        e.source,
                        Primitive.SEQUENCE,
                    )
                )
            if e.target not in visited:
                visit(e.target)

    visit(initial.id)
    return properties


def render_ltlspec(properties) -> str:
    """One LTLSPEC line per property, LF separated; empty input renders as
    the empty string."""
    lines = []
    for prop in properties:
        formula = prop.formula if isinstance(prop, GeneratedProperty) else prop
        lines.append(f"LTLSPEC {render_formula(formula)}\n")
    return "".join(lines)
