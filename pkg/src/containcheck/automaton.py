"""Translation of temporal formulas into generalized Buchi automata via the
classic on-the-fly tableau construction.

The input formula is first rewritten into negation normal form over
literals, X, U (until), and R (release); G and F become R/U instances and
xor/implication expand into and/or. Tableau nodes split disjunctions and
unwind U/R one step at a time; fully expanded nodes with identical
obligations merge. The result is a state-labeled automaton: entering a
state requires its literals to hold, and one acceptance set per U-formula
keeps postponed eventualities honest.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ltl


# --- normal form ---------------------------------------------------------

class NnfFormula:
    __slots__ = ()


@dataclass(frozen=True)
class NTrue(NnfFormula):
    pass


@dataclass(frozen=True)
class NFalse(NnfFormula):
    pass


@dataclass(frozen=True)
class NLit(NnfFormula):
    atom: str
    negated: bool


@dataclass(frozen=True)
class NAnd(NnfFormula):
    left: NnfFormula
    right: NnfFormula


@dataclass(frozen=True)
class NOr(NnfFormula):
    left: NnfFormula
    right: NnfFormula


@dataclass(frozen=True)
class NNext(NnfFormula):
    operand: NnfFormula


@dataclass(frozen=True)
class NUntil(NnfFormula):
    left: NnfFormula
    right: NnfFormula


@dataclass(frozen=True)
class NRelease(NnfFormula):
    left: NnfFormula
    right: NnfFormula


def to_nnf(formula: ltl.Formula, negate: bool = False) -> NnfFormula:
    """Rewrite into NNF, optionally negating on the way down."""
    if isinstance(formula, ltl.Atom):
        return NLit(formula.name, negate)
    if isinstance(formula, ltl.TrueConst):
        return NFalse() if negate else NTrue()
    if isinstance(formula, ltl.FalseConst):
        return NTrue() if negate else NFalse()
    if isinstance(formula, ltl.Not):
        return to_nnf(formula.operand, not negate)
    if isinstance(formula, ltl.Next):
        return NNext(to_nnf(formula.operand, negate))
    if isinstance(formula, ltl.Always):
        # G f = false R f; !G f = true U !f
        if negate:
            return NUntil(NTrue(), to_nnf(formula.operand, True))
        return NRelease(NFalse(), to_nnf(formula.operand, False))
    if isinstance(formula, ltl.Eventually):
        # F f = true U f; !F f = false R !f
        if negate:
            return NRelease(NFalse(), to_nnf(formula.operand, True))
        return NUntil(NTrue(), to_nnf(formula.operand, False))
    if isinstance(formula, ltl.And):
        cls = NOr if negate else NAnd
        return cls(to_nnf(formula.left, negate), to_nnf(formula.right, negate))
    if isinstance(formula, ltl.Or):
        cls = NAnd if negate else NOr
        return cls(to_nnf(formula.left, negate), to_nnf(formula.right, negate))
    if isinstance(formula, ltl.Implies):
        cls = NAnd if negate else NOr
        return cls(to_nnf(formula.left, not negate), to_nnf(formula.right, negate))
    if isinstance(formula, ltl.Xor):
        # a xor b = (a & !b) | (!a & b); the negation is the biconditional.
        a, b = formula.left, formula.right
        if negate:
            return NOr(
                NAnd(to_nnf(a, False), to_nnf(b, False)),
                NAnd(to_nnf(a, True), to_nnf(b, True)),
            )
        return NOr(
            NAnd(to_nnf(a, False), to_nnf(b, True)),
            NAnd(to_nnf(a, True), to_nnf(b, False)),
        )
    raise TypeError(f"untranslatable formula {formula!r}")


def _until_subformulas(formula: NnfFormula) -> list[NUntil]:
    out: list[NUntil] = []

    def walk(f: NnfFormula) -> None:
        if isinstance(f, NUntil):
            if f not in out:
                out.append(f)
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (NAnd, NOr, NRelease)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, NNext):
            walk(f.operand)

    walk(formula)
    return out


# --- tableau construction ------------------------------------------------

_INIT = -1  # synthetic incoming marker for initial automaton states


@dataclass
class _Node:
    id: int
    incoming: set[int]
    new: list[NnfFormula]
    old: set[NnfFormula]
    nxt: set[NnfFormula]


@dataclass(frozen=True)
class BuchiState:
    id: int
    literals: tuple[tuple[str, bool], ...]  # (atom, negated), sorted


class BuchiAutomaton:
    """State-labeled generalized Buchi automaton.

    A run q0 q1 ... matches a word x0 x1 ... when every xi satisfies the
    literals of qi; it accepts when it visits each acceptance set
    infinitely often (no sets means every infinite run accepts).
    """

    def __init__(
        self,
        states: list[BuchiState],
        initial: list[int],
        transitions: dict[int, tuple[int, ...]],
        acceptance: list[frozenset[int]],
    ):
        self.states = {s.id: s for s in states}
        self.initial = tuple(initial)
        self.transitions = transitions
        self.acceptance = acceptance

    def successors(self, state_id: int) -> tuple[int, ...]:
        return self.transitions.get(state_id, ())

    def literals(self, state_id: int) -> tuple[tuple[str, bool], ...]:
        return self.states[state_id].literals


def _formula_key(f: NnfFormula) -> str:
    return repr(f)


def build_automaton(formula: NnfFormula) -> BuchiAutomaton:
    """Tableau expansion of an NNF formula into a generalized Buchi
    automaton accepting exactly the formula's models."""
    counter = [0]
    nodes: list[_Node] = []

    def fresh(incoming: set[int], new: list[NnfFormula], old: set[NnfFormula], nxt: set[NnfFormula]) -> _Node:
        counter[0] += 1
        return _Node(counter[0], set(incoming), list(new), set(old), set(nxt))

    def expand(node: _Node) -> None:
        if not node.new:
            for existing in nodes:
                if existing.old == node.old and existing.nxt == node.nxt:
                    existing.incoming |= node.incoming
                    return
            nodes.append(node)
            expand(fresh({node.id}, sorted(node.nxt, key=_formula_key), set(), set()))
            return
        f = node.new.pop(0)
        if f in node.old:
            expand(node)
            return
        if isinstance(f, NTrue):
            expand(node)
            return
        if isinstance(f, NFalse):
            return
        if isinstance(f, NLit):
            if NLit(f.atom, not f.negated) in node.old:
                return
            node.old.add(f)
            expand(node)
            return
        if isinstance(f, NAnd):
            node.old.add(f)
            for part in (f.left, f.right):
                if part not in node.old and part not in node.new:
                    node.new.append(part)
            expand(node)
            return
        if isinstance(f, NNext):
            node.old.add(f)
            node.nxt.add(f.operand)
            expand(node)
            return
        if isinstance(f, NOr):
            first = fresh(node.incoming, node.new + [f.left], node.old | {f}, node.nxt)
            second = fresh(node.incoming, node.new + [f.right], node.old | {f}, node.nxt)
            expand(first)
            expand(second)
            return
        if isinstance(f, NUntil):
            first = fresh(node.incoming, node.new + [f.left], node.old | {f}, node.nxt | {f})
            second = fresh(node.incoming, node.new + [f.right], node.old | {f}, node.nxt)
            expand(first)
            expand(second)
            return
        if isinstance(f, NRelease):
            first = fresh(node.incoming, node.new + [f.right], node.old | {f}, node.nxt | {f})
            second = fresh(node.incoming, node.new + [f.left, f.right], node.old | {f}, node.nxt)
            expand(first)
            expand(second)
            return
        raise TypeError(f"unexpandable formula {f!r}")

    expand(fresh({_INIT}, [formula], set(), set()))

    states = []
    for node in nodes:
        literals = tuple(
            sorted((f.atom, f.negated) for f in node.old if isinstance(f, NLit))
        )
        states.append(BuchiState(node.id, literals))
    initial = [n.id for n in nodes if _INIT in n.incoming]
    transitions: dict[int, list[int]] = {n.id: [] for n in nodes}
    for node in nodes:
        for source in sorted(node.incoming):
            if source != _INIT and source in transitions:
                transitions[source].append(node.id)
    acceptance = []
    for until in _until_subformulas(formula):
        acceptance.append(
            frozenset(
                n.id for n in nodes if until not in n.old or until.right in n.old
            )
        )
    return BuchiAutomaton(
        states,
        initial,
        {k: tuple(sorted(v)) for k, v in transitions.items()},
        acceptance,
    )


def automaton_for_negation(formula: ltl.Formula) -> BuchiAutomaton:
    """Automaton accepting exactly the words that violate the formula."""
    return build_automaton(to_nnf(formula, negate=True))
