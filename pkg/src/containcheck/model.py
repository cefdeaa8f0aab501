"""Behavior-model graph: typed nodes, guarded edges, well-formedness checks."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

ID_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

#: Surface-syntax words that cannot double as node ids (the textual model
#: format could not reproduce them).
RESERVED_IDS = frozenset(
    {"model", "initial", "final", "action", "fork", "join", "decision", "merge"}
)


class NodeKind(Enum):
    INITIAL = "initial"
    FINAL = "final"
    ACTION = "action"
    FORK = "fork"
    JOIN = "join"
    DECISION = "decision"
    MERGE = "merge"

    @classmethod
    def from_string(cls, text: str) -> "NodeKind":
        for kind in cls:
            if kind.value == text:
                return kind
        raise ValueError(f"unknown node kind {text!r}")


#: Kinds that only route control flow; they never appear as atoms in
#: generated temporal properties.
STRUCTURAL_KINDS = frozenset(
    {NodeKind.FORK, NodeKind.JOIN, NodeKind.DECISION, NodeKind.MERGE}
)


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    # Display name, defaulting to the id. Cosmetic: excluded from equality
    # so the DSL (which has no name syntax) round-trips JSON models too.
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            object.__setattr__(self, "name", self.id)

    @property
    def structural(self) -> bool:
        return self.kind in STRUCTURAL_KINDS


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    guard: str | None = None


def synthetic_guard(decision_id: str, target_id: str) -> str:
    """Canonical label for an unlabeled decision branch; doubles as the
    scalar value name in generated SMV."""
    return f"guard_{decision_id}_{target_id}"


@dataclass(frozen=True)
class ActivityModel:
    """Immutable control-flow graph shared by both abstraction levels.

    Construction normalizes fully-unguarded decision branches to synthetic
    guard labels so that printing, reparsing, and SMV generation all see the
    same edge data. Mixed guarded/unguarded branches are left untouched for
    validate() to report.
    """

    name: str
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]

    def __init__(self, name: str, nodes, edges) -> None:
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(self._label_decisions(nodes, edges)))

    @staticmethod
    def _label_decisions(nodes, edges) -> list[Edge]:
        decisions = {n.id for n in nodes if n.kind is NodeKind.DECISION}
        unlabeled = {
            d
            for d in decisions
            if all(e.guard is None for e in edges if e.source == d)
        }
        out = []
        for e in edges:
            if e.source in unlabeled:
                e = Edge(e.source, e.target, synthetic_guard(e.source, e.target))
            out.append(e)
        return out

    def node(self, node_id: str) -> Node:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise ValueError(f"unknown node {node_id!r} in model {self.name!r}")

    def has_node(self, node_id: str) -> bool:
        return any(n.id == node_id for n in self.nodes)

    def outgoing(self, node_id: str) -> tuple[Edge, ...]:
        self.node(node_id)
        return tuple(e for e in self.edges if e.source == node_id)

    def incoming(self, node_id: str) -> tuple[Edge, ...]:
        self.node(node_id)
        return tuple(e for e in self.edges if e.target == node_id)


@dataclass(frozen=True)
class Violation:
    """One well-formedness failure, located at a node or an edge."""

    message: str
    node_id: str | None = None
    edge: tuple[str, str] | None = None

    def __str__(self) -> str:
        if self.node_id is not None:
            return f"{self.node_id}: {self.message}"
        if self.edge is not None:
            return f"{self.edge[0]} -> {self.edge[1]}: {self.message}"
        return self.message


def successors(model: ActivityModel, node_id: str) -> list[str]:
    """Targets of the node's outgoing edges, in edge declaration order."""
    return [e.target for e in model.outgoing(node_id)]


def predecessors(model: ActivityModel, node_id: str) -> list[str]:
    """Sources of the node's incoming edges, in edge declaration order."""
    return [e.source for e in model.incoming(node_id)]


def validate(model: ActivityModel) -> list[Violation]:
    """Collect every invariant violation; an empty list means the model is
    well formed. Never raises on malformed graphs: violations are data.
    """
    out: list[Violation] = []
    seen: set[str] = set()
    for n in model.nodes:
        if not ID_PATTERN.match(n.id):
            out.append(Violation(f"id {n.id!r} is not a legal identifier", n.id))
        elif n.id in RESERVED_IDS:
            out.append(Violation(f"id {n.id!r} is a reserved word", n.id))
        if n.id in seen:
            out.append(Violation(f"duplicate node id {n.id!r}", n.id))
        seen.add(n.id)

    known = {n.id for n in model.nodes}
    for e in model.edges:
        if e.source not in known:
            out.append(Violation(f"unknown source node {e.source!r}", edge=(e.source, e.target)))
        if e.target not in known:
            out.append(Violation(f"unknown target node {e.target!r}", edge=(e.source, e.target)))
    if any(v.edge for v in out) or len(seen) != len(model.nodes):
        # Arity and reachability checks assume resolvable, unique endpoints.
        return out

    n_in = {n.id: len(model.incoming(n.id)) for n in model.nodes}
    n_out = {n.id: len(model.outgoing(n.id)) for n in model.nodes}

    initials = [n for n in model.nodes if n.kind is NodeKind.INITIAL]
    if not initials:
        out.append(Violation("model has no initial node"))
    elif len(initials) > 1:
        for n in initials[1:]:
            out.append(Violation("more than one initial node", n.id))
    if not any(n.kind is NodeKind.FINAL for n in model.nodes):
        out.append(Violation("model has no final node"))

    for n in model.nodes:
        i, o = n_in[n.id], n_out[n.id]
        if n.kind is NodeKind.INITIAL:
            if i != 0:
                out.append(Violation("initial node must have no incoming edges", n.id))
            if o != 1:
                out.append(Violation("initial node requires exactly 1 outgoing edge", n.id))
        elif n.kind is NodeKind.FINAL:
            if o != 0:
                out.append(Violation("final node must have no outgoing edges", n.id))
            if i < 1:
                out.append(Violation("final node requires at least 1 incoming edge", n.id))
        elif n.kind is NodeKind.ACTION:
            if i < 1:
                out.append(Violation("action requires at least 1 incoming edge", n.id))
            if o != 1:
                out.append(Violation("action requires exactly 1 outgoing edge", n.id))
        elif n.kind in (NodeKind.FORK, NodeKind.DECISION):
            if i < 1:
                out.append(Violation(f"{n.kind.value} requires at least 1 incoming edge", n.id))
            if o < 2:
                out.append(Violation(f"{n.kind.value} requires >=2 outgoing edges", n.id))
        else:  # join, merge
            if i < 2:
                out.append(Violation(f"{n.kind.value} requires >=2 incoming edges", n.id))
            if o != 1:
                out.append(Violation(f"{n.kind.value} requires exactly 1 outgoing edge", n.id))

    for n in model.nodes:
        if n.kind is not NodeKind.DECISION:
            for e in model.outgoing(n.id):
                if e.guard is not None:
                    out.append(
                        Violation("guard is only allowed on decision branches", edge=(e.source, e.target))
                    )
        else:
            branches = model.outgoing(n.id)
            guarded = [e for e in branches if e.guard is not None]
            if guarded and len(guarded) != len(branches):
                out.append(
                    Violation("decision branches must be all guarded or all unguarded", n.id)
                )

    if initials and len(initials) == 1:
        reached = {initials[0].id}
        frontier = [initials[0].id]
        while frontier:
            current = frontier.pop()
            for e in model.outgoing(current):
                if e.target not in reached:
                    reached.add(e.target)
                    frontier.append(e.target)
        for n in model.nodes:
            if n.id not in reached:
                out.append(Violation("unreachable from the initial node", n.id))

    return out


def is_acyclic(model: ActivityModel) -> bool:
    """True iff the directed graph has no cycle (iterative three-color DFS)."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n.id: WHITE for n in model.nodes}
    adjacency = {n.id: successors(model, n.id) for n in model.nodes}
    for start in color:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            node_id, idx = stack[-1]
            if idx < len(adjacency[node_id]):
                stack[-1] = (node_id, idx + 1)
                nxt = adjacency[node_id][idx]
                if color[nxt] == GRAY:
                    return False
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, 0))
            else:
                color[node_id] = BLACK
                stack.pop()
    return True
