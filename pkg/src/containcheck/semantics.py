"""Finite transition system induced by a generated SMV module.

States assign one value per variable: Python bools for node variables and
value strings for decision scalars ("undetermined" or a guard value). All
states of one system share a fixed variable order (the module's declaration
order), so states are plain tuples: hashable, comparable, and cheap to
store. Successors evaluate every variable's first matching case arm against
the current state simultaneously; nondeterministic decision arms expand
into one successor per chosen value.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .model import synthetic_guard
from .smv import (
    AndCond,
    Choice,
    CondExpr,
    ConstTrue,
    GuardEq,
    Keep,
    Literal,
    NotUndetermined,
    OrCond,
    SmvModule,
    VarTrue,
    ValueExpr,
)

State = tuple  # one value per variable, in system variable order

DEFAULT_STATE_CAP = 1_000_000


class StateCapExceeded(Exception):
    def __init__(self, cap: int, frontier: int):
        super().__init__(
            f"state-space cap of {cap} states exceeded (frontier size {frontier})"
        )
        self.cap = cap
        self.frontier = frontier


class ChoicesExhausted(Exception):
    """Raised by simulate when a branching state has no remaining choice."""


class TransitionSystem:
    """Immutable after construction; successor computation is pure and
    memoized, so concurrent readers are safe."""

    def __init__(self, module: SmvModule):
        self.module = module
        self.var_names: tuple[str, ...] = tuple(d.name for d in module.vars)
        self._index = {name: i for i, name in enumerate(self.var_names)}
        self._scalars = {
            d.name: d.scalar_values for d in module.vars if not d.is_boolean
        }
        order = {name: i for i, name in enumerate(self.var_names)}
        self._assigns = tuple(sorted(module.assigns, key=lambda a: order[a.var]))
        if tuple(a.var for a in self._assigns) != self.var_names:
            raise ValueError("module must assign every declared variable exactly once")
        self.initial: State = tuple(
            self._init_value(a.init, a.var) for a in self._assigns
        )
        self._successor_cache: dict[State, tuple[State, ...]] = {}

    def _init_value(self, value: ValueExpr, var: str):
        if isinstance(value, Literal):
            return self._decode(var, value.text)
        raise ValueError(f"init({var}) must be a concrete value")

    def _decode(self, var: str, text: str):
        if var in self._scalars:
            if text not in self._scalars[var]:
                raise ValueError(f"{text!r} is not a value of {var!r}")
            return text
        if text in ("TRUE", "FALSE"):
            return text == "TRUE"
        raise ValueError(f"{text!r} is not a boolean value")

    def is_boolean_var(self, name: str) -> bool:
        return name in self._index and name not in self._scalars

    def atom_value(self, state: State, atom: str) -> bool:
        """Atoms name boolean node variables only."""
        if not self.is_boolean_var(atom):
            raise ValueError(f"atom {atom!r} is not a boolean variable")
        return state[self._index[atom]]

    def value_of(self, state: State, name: str):
        return state[self._index[name]]

    def state_items(self, state: State) -> list[tuple[str, str]]:
        """(name, printable value) pairs in variable order."""
        out = []
        for name, value in zip(self.var_names, state):
            if isinstance(value, bool):
                out.append((name, "TRUE" if value else "FALSE"))
            else:
                out.append((name, value))
        return out

    def _eval_cond(self, cond: CondExpr, state: State) -> bool:
        if isinstance(cond, VarTrue):
            return bool(state[self._index[cond.name]])
        if isinstance(cond, GuardEq):
            return state[self._index[cond.var]] == cond.value
        if isinstance(cond, NotUndetermined):
            return state[self._index[cond.var]] != "undetermined"
        if isinstance(cond, ConstTrue):
            return True
        if isinstance(cond, AndCond):
            return all(self._eval_cond(p, state) for p in cond.parts)
        if isinstance(cond, OrCond):
            return any(self._eval_cond(p, state) for p in cond.parts)
        raise TypeError(f"unevaluable condition {cond!r}")

    def successors(self, state: State) -> tuple[State, ...]:
        """All next states under simultaneous update; never empty for
        states of generated modules (the default arms totalize)."""
        cached = self._successor_cache.get(state)
        if cached is not None:
            return cached
        per_var: list[tuple] = []
        for assign in self._assigns:
            for cond, value in assign.cases:
                if self._eval_cond(cond, state):
                    break
            else:
                raise ValueError(f"no case arm matched for {assign.var!r}")
            if isinstance(value, Literal):
                per_var.append((self._decode(assign.var, value.text),))
            elif isinstance(value, Keep):
                per_var.append((state[self._index[value.var]],))
            elif isinstance(value, Choice):
                per_var.append(tuple(value.values))
            else:
                raise TypeError(f"unevaluable value {value!r}")
        result = tuple(product(*per_var))
        self._successor_cache[state] = result
        return result


def build_system(module: SmvModule) -> TransitionSystem:
    """Construct the transition system for a generated (or structurally
    equivalent) module."""
    return TransitionSystem(module)


@dataclass(frozen=True)
class ReachableSet:
    states: frozenset
    transition_count: int
    order: tuple  # BFS discovery order


def reachable_states(sys: TransitionSystem, cap: int = DEFAULT_STATE_CAP) -> ReachableSet:
    """BFS closure from the initial state; raises StateCapExceeded when more
    than cap states are discovered."""
    if cap <= 0:
        raise ValueError("cap must be positive")
    seen = {sys.initial}
    order = [sys.initial]
    frontier = [sys.initial]
    transitions = 0
    while frontier:
        next_frontier = []
        for state in frontier:
            for succ in sys.successors(state):
                transitions += 1
                if succ not in seen:
                    seen.add(succ)
                    order.append(succ)
                    next_frontier.append(succ)
                    if len(seen) > cap:
                        raise StateCapExceeded(cap, len(next_frontier))
        frontier = next_frontier
    return ReachableSet(frozenset(seen), transitions, tuple(order))


def simulate(sys: TransitionSystem, choices) -> list[State]:
    """Deterministic run resolving decision branches from `choices`, a
    sequence of (decision_id, target_id) pairs consumed in the order the
    branchings occur. The trace ends when a state repeats (every generated
    system eventually cycles; acyclic models settle into the idle sink).

    Raises ChoicesExhausted when a branching state has no remaining choice,
    and ValueError when the next choice does not name the triggered branch.
    """
    pending = list(choices)
    trace = [sys.initial]
    seen = {sys.initial}
    scalars = sys._scalars
    while True:
        current = trace[-1]
        succs = sys.successors(current)
        if len(succs) == 1:
            chosen = succs[0]
        else:
            triggered = [
                name
                for name in sys.var_names
                if name in scalars
                and len({s[sys._index[name]] for s in succs}) > 1
            ]
            wanted: dict[str, str] = {}
            for decision in triggered:
                if not pending:
                    raise ChoicesExhausted(
                        f"no choice left for decision {decision!r} at step {len(trace)}"
                    )
                chosen_decision, target = pending.pop(0)
                if chosen_decision != decision:
                    raise ValueError(
                        f"expected a choice for {decision!r}, got {chosen_decision!r}"
                    )
                value = synthetic_guard(decision, target)
                if value not in scalars[decision]:
                    raise ValueError(f"{target!r} is not a branch of {decision!r}")
                wanted[decision] = value
            matching = [
                s
                for s in succs
                if all(s[sys._index[d]] == v for d, v in wanted.items())
            ]
            if not matching:
                raise ValueError("choices did not select a successor")
            chosen = matching[0]
        if chosen in seen:
            return trace
        trace.append(chosen)
        seen.add(chosen)
