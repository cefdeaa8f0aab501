"""Property checking against the transition system, with lasso
counterexamples and an independent brute-force oracle.

check() negates the property, builds its tableau automaton, explores the
product with the system, and searches for a reachable fair cycle: a
strongly connected component touching every acceptance set. A violation is
reported as a lasso (finite prefix plus repeating loop), re-verified by
direct evaluation on the induced ultimately-periodic word before being
returned.

oracle_check() never builds an automaton: it enumerates lassos of the
system directly and evaluates the property on each word by unrolling. On a
system whose paths all settle into a sink within the depth bound (every
acyclic model does) the enumeration is exhaustive, so the verdicts of the
two routes must agree; on cyclic systems the oracle is sound for
violations found within the bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import ltl
from .automaton import BuchiAutomaton, automaton_for_negation
from .semantics import (
    DEFAULT_STATE_CAP,
    StateCapExceeded,
    TransitionSystem,
    reachable_states,
)

ORACLE_STATE_LIMIT = 4096


class UnknownAtomError(Exception):
    def __init__(self, bad_atoms: list[str]):
        super().__init__(
            "atoms are not boolean variables of the system: " + ", ".join(bad_atoms)
        )
        self.bad_atoms = bad_atoms


class CounterexampleUnsound(Exception):
    """Internal consistency failure: an emitted lasso did not violate its
    property under direct re-evaluation."""


@dataclass(frozen=True)
class Lasso:
    """A violating infinite word: prefix once, then the loop forever.

    States are stored as printable value tuples aligned with var_names
    (TRUE/FALSE for node variables, value names for decision scalars), so a
    lasso renders without the system at hand. A value may be None when the
    state was reconstructed from partial external output.
    """

    var_names: tuple[str, ...]
    prefix: tuple[tuple, ...]
    loop: tuple[tuple, ...]

    def _to_dict(self, row) -> dict:
        return {
            name: value
            for name, value in zip(self.var_names, row)
            if value is not None
        }

    def prefix_dicts(self) -> list[dict]:
        return [self._to_dict(row) for row in self.prefix]

    def loop_dicts(self) -> list[dict]:
        return [self._to_dict(row) for row in self.loop]


@dataclass(frozen=True)
class Verdict:
    formula: ltl.Formula
    holds: bool
    counterexample: Lasso | None = None
    primitive: ltl.Primitive | None = None
    origin: str | None = None

    def __post_init__(self) -> None:
        if self.holds == (self.counterexample is not None):
            raise ValueError("a counterexample is present exactly when the property fails")


def _check_atoms(sys: TransitionSystem, formula: ltl.Formula) -> None:
    bad = sorted(a for a in ltl.atoms(formula) if not sys.is_boolean_var(a))
    if bad:
        raise UnknownAtomError(bad)


def _satisfies_literals(sys: TransitionSystem, state, literals) -> bool:
    return all(sys.atom_value(state, atom) != negated for atom, negated in literals)


def _printable(sys: TransitionSystem, state) -> tuple:
    return tuple(value for _, value in sys.state_items(state))


def check(
    sys: TransitionSystem,
    prop: ltl.Formula,
    cap: int = DEFAULT_STATE_CAP,
    primitive: ltl.Primitive | None = None,
    origin: str | None = None,
) -> Verdict:
    """Decide whether every infinite path from the initial state satisfies
    the property; on failure return a verified lasso counterexample.

    cap bounds the number of product states explored.
    """
    _check_atoms(sys, prop)
    auto = automaton_for_negation(prop)

    # Reachable product graph, breadth first for shortest prefixes.
    inits = [
        (sys.initial, q)
        for q in auto.initial
        if _satisfies_literals(sys, sys.initial, auto.literals(q))
    ]
    adjacency: dict[tuple, tuple] = {}
    parent: dict[tuple, tuple | None] = {p: None for p in inits}
    order: list[tuple] = list(inits)
    frontier = list(inits)
    while frontier:
        next_frontier = []
        for node in frontier:
            state, q = node
            succs = []
            for next_state in sys.successors(state):
                for q2 in auto.successors(q):
                    if _satisfies_literals(sys, next_state, auto.literals(q2)):
                        succs.append((next_state, q2))
            adjacency[node] = tuple(succs)
            for succ in succs:
                if succ not in parent:
                    parent[succ] = node
                    order.append(succ)
                    next_frontier.append(succ)
                    if len(parent) > cap:
                        raise StateCapExceeded(cap, len(next_frontier))
        frontier = next_frontier

    target = _find_fair_scc(adjacency, order, auto)
    if target is None:
        return Verdict(prop, True, None, primitive, origin)
    scc, entry = target

    prefix_product: list[tuple] = []
    node = entry
    while node is not None:
        prefix_product.append(node)
        node = parent[node]
    prefix_product.reverse()

    loop_product = _fair_cycle(adjacency, scc, entry, auto)

    prefix = [p[0] for p in prefix_product[:-1]]
    loop = [p[0] for p in loop_product]
    if evaluate_on_lasso(prop, prefix, loop, sys.atom_value):
        raise CounterexampleUnsound(ltl.render_formula(prop))
    lasso = Lasso(
        sys.var_names,
        tuple(_printable(sys, s) for s in prefix),
        tuple(_printable(sys, s) for s in loop),
    )
    return Verdict(prop, False, lasso, primitive, origin)


def _find_fair_scc(adjacency, order, auto: BuchiAutomaton):
    """First (by BFS discovery of its entry state) nontrivial SCC that
    intersects every acceptance set; returns (scc_set, entry_state)."""
    index_of: dict[tuple, int] = {}
    lowlink: dict[tuple, int] = {}
    on_stack: set[tuple] = set()
    stack: list[tuple] = []
    counter = [0]
    sccs: list[frozenset] = []

    for root in order:
        if root in index_of:
            continue
        work = [(root, iter(adjacency.get(root, ())))]
        index_of[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, edges = work[-1]
            advanced = False
            for succ in edges:
                if succ not in index_of:
                    index_of[succ] = lowlink[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(adjacency.get(succ, ()))))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index_of[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent_node = work[-1][0]
                lowlink[parent_node] = min(lowlink[parent_node], lowlink[node])
            if lowlink[node] == index_of[node]:
                component = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == node:
                        break
                sccs.append(frozenset(component))

    def is_fair(component: frozenset) -> bool:
        if len(component) == 1:
            member = next(iter(component))
            if member not in adjacency.get(member, ()):
                return False
        automaton_ids = {q for _, q in component}
        return all(automaton_ids & acc for acc in auto.acceptance)

    fair = [c for c in sccs if is_fair(c)]
    if not fair:
        return None
    position = {node: i for i, node in enumerate(order)}
    best = min(fair, key=lambda c: min(position[m] for m in c))
    entry = min(best, key=lambda m: position[m])
    return best, entry


def _fair_cycle(adjacency, scc: frozenset, entry, auto: BuchiAutomaton) -> list[tuple]:
    """A cycle inside the SCC through `entry` visiting every acceptance set,
    returned as the loop state list starting at `entry`."""

    def bfs_path(start, goal_test, min_one_step: bool) -> list[tuple]:
        if not min_one_step and goal_test(start):
            return [start]
        parents = {start: None}
        frontier = [start]
        while frontier:
            next_frontier = []
            for node in frontier:
                for succ in adjacency.get(node, ()):
                    if succ not in scc:
                        continue
                    if succ not in parents:
                        parents[succ] = node
                        if goal_test(succ):
                            path = [succ]
                            back = node
                            while back is not None:
                                path.append(back)
                                back = parents[back]
                            path.reverse()
                            return path
                        next_frontier.append(succ)
                    elif succ == start and goal_test(succ):
                        # Close the cycle even though start was already seen.
                        path = [succ, node]
                        back = parents[node]
                        while back is not None:
                            path.append(back)
                            back = parents[back]
                        path.reverse()
                        return path
            frontier = next_frontier
        raise RuntimeError("strongly connected component is not connected")

    walk = [entry]
    for acceptance in auto.acceptance:
        if any(q in acceptance for _, q in walk):
            continue
        segment = bfs_path(walk[-1], lambda n: n[1] in acceptance, min_one_step=False)
        walk.extend(segment[1:])
    closing = bfs_path(walk[-1], lambda n: n == entry, min_one_step=True)
    walk.extend(closing[1:])
    return walk[:-1]


def check_all(sys: TransitionSystem, properties, cap: int = DEFAULT_STATE_CAP) -> list[Verdict]:
    """One verdict per property, input order preserved; checks are
    independent of each other."""
    out = []
    for prop in properties:
        if isinstance(prop, ltl.GeneratedProperty):
            out.append(check(sys, prop.formula, cap, prop.primitive, prop.origin))
        else:
            out.append(check(sys, prop, cap))
    return out


def evaluate_on_lasso(formula: ltl.Formula, prefix, loop, atom_value) -> bool:
    """Truth of the formula at position 0 of the word prefix . loop^omega,
    by direct evaluation over the lasso's positions (no automaton involved).

    atom_value(state, name) supplies atom truth per state.
    """
    states = list(prefix) + list(loop)
    n = len(states)
    loop_start = len(prefix)
    cache: dict[ltl.Formula, list[bool]] = {}

    def nxt(i: int) -> int:
        return i + 1 if i < n - 1 else loop_start

    def reachable(i: int) -> range:
        return range(min(i, loop_start), n) if i >= loop_start else range(i, n)

    def table(f: ltl.Formula) -> list[bool]:
        hit = cache.get(f)
        if hit is not None:
            return hit
        if isinstance(f, ltl.Atom):
            vals = [bool(atom_value(s, f.name)) for s in states]
        elif isinstance(f, ltl.TrueConst):
            vals = [True] * n
        elif isinstance(f, ltl.FalseConst):
            vals = [False] * n
        elif isinstance(f, ltl.Not):
            inner = table(f.operand)
            vals = [not v for v in inner]
        elif isinstance(f, ltl.Next):
            inner = table(f.operand)
            vals = [inner[nxt(i)] for i in range(n)]
        elif isinstance(f, ltl.Eventually):
            inner = table(f.operand)
            vals = [any(inner[j] for j in reachable(i)) for i in range(n)]
        elif isinstance(f, ltl.Always):
            inner = table(f.operand)
            vals = [all(inner[j] for j in reachable(i)) for i in range(n)]
        elif isinstance(f, (ltl.And, ltl.Or, ltl.Xor, ltl.Implies)):
            left, right = table(f.left), table(f.right)
            if isinstance(f, ltl.And):
                vals = [a and b for a, b in zip(left, right)]
            elif isinstance(f, ltl.Or):
                vals = [a or b for a, b in zip(left, right)]
            elif isinstance(f, ltl.Xor):
                vals = [a != b for a, b in zip(left, right)]
            else:
                vals = [(not a) or b for a, b in zip(left, right)]
        else:
            raise TypeError(f"unevaluable formula {f!r}")
        cache[f] = vals
        return vals

    if n == 0:
        raise ValueError("lasso must contain at least one state")
    return table(formula)[0]


class OracleError(Exception):
    pass


def oracle_check(sys: TransitionSystem, prop: ltl.Formula, depth: int) -> Verdict:
    """Brute-force verdict: enumerate every lasso with |prefix| + |loop| up
    to `depth` and evaluate the property on each by direct unrolling.

    Exhaustive (hence in agreement with check) whenever every distinct
    behavior of the system closes a lasso within the bound; for systems
    whose paths all reach a self-looping sink that holds once depth exceeds
    the longest simple path plus one. Violations found are always genuine.
    """
    if depth < 1:
        raise OracleError("depth must be positive")
    _check_atoms(sys, prop)
    try:
        reach = reachable_states(sys, cap=ORACLE_STATE_LIMIT)
    except StateCapExceeded as exc:
        raise OracleError(
            f"system too large for the oracle (more than {ORACLE_STATE_LIMIT} states)"
        ) from exc
    del reach

    failing: list[tuple[list, list]] = []

    def explore(path: list) -> bool:
        """DFS over paths; True once a violating lasso is found."""
        if len(path) >= depth:
            return False
        for succ in sys.successors(path[-1]):
            for j, earlier in enumerate(path):
                if earlier == succ:
                    prefix, loop = path[:j], path[j:]
                    if evaluate_on_lasso(prop, prefix, loop, sys.atom_value) is False:
                        failing.append((prefix, loop))
                        return True
            path.append(succ)
            if explore(path):
                return True
            path.pop()
        return False

    explore([sys.initial])
    if not failing:
        return Verdict(prop, True)
    prefix, loop = failing[0]
    lasso = Lasso(
        sys.var_names,
        tuple(_printable(sys, s) for s in prefix),
        tuple(_printable(sys, s) for s in loop),
    )
    return Verdict(prop, False, lasso)


# --- reporting -----------------------------------------------------------

def render_report(verdicts: list[Verdict], format: str = "text") -> str:
    if format == "text":
        return _render_text(verdicts)
    if format == "json":
        return _render_json(verdicts)
    raise ValueError(f"unknown report format {format!r}")


def _render_text(verdicts: list[Verdict]) -> str:
    lines: list[str] = []
    trace_number = 0
    for verdict in verdicts:
        word = "true" if verdict.holds else "false"
        lines.append(f"-- specification {ltl.render_formula(verdict.formula)} is {word}")
        if verdict.holds:
            continue
        trace_number += 1
        lines.append("-- as demonstrated by the following execution sequence")
        lines.append("Trace Description: LTL Counterexample")
        lines.append("Trace Type: Counterexample")
        lasso = verdict.counterexample
        rows = list(lasso.prefix) + list(lasso.loop) + [lasso.loop[0]]
        loop_index = len(lasso.prefix)
        previous = None
        for i, row in enumerate(rows):
            if i == loop_index:
                lines.append("-- Loop starts here")
            lines.append(f"-> State: {trace_number}.{i + 1} <-")
            for pos, (name, value) in enumerate(zip(lasso.var_names, row)):
                if value is None:
                    continue
                if previous is None or previous[pos] != value:
                    lines.append(f"  {name} = {value}")
            previous = row
    return "\n".join(lines) + ("\n" if lines else "")


def _json_value(value):
    if value == "TRUE":
        return True
    if value == "FALSE":
        return False
    return value


def _render_json(verdicts: list[Verdict]) -> str:
    properties = []
    for verdict in verdicts:
        entry: dict = {
            "formula": ltl.render_formula(verdict.formula),
            "primitive": verdict.primitive.value if verdict.primitive else None,
            "holds": verdict.holds,
        }
        if verdict.counterexample is not None:
            lasso = verdict.counterexample
            entry["counterexample"] = {
                "prefix": [
                    {k: _json_value(v) for k, v in row.items()}
                    for row in lasso.prefix_dicts()
                ],
                "loop": [
                    {k: _json_value(v) for k, v in row.items()}
                    for row in lasso.loop_dicts()
                ],
            }
        properties.append(entry)
    return json.dumps({"properties": properties}, indent=2) + "\n"
