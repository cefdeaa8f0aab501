"""Shared fixtures: the order-processing models, their systems, and a
seeded generator of random well-formed acyclic models for the
property-based suites."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from containcheck.ingest import load_model
from containcheck.model import (
    ActivityModel,
    Edge,
    Node,
    NodeKind,
    is_acyclic,
    validate,
)
from containcheck.semantics import build_system
from containcheck.smv import generate_smv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = FIXTURES / "golden"

HIGH = FIXTURES / "order_processing_high.behavior"
LOW_UNSAT = FIXTURES / "order_processing_low_unsat.behavior"
LOW_UNSAT_JSON = FIXTURES / "order_processing_low_unsat.json"
LOW_SAT = FIXTURES / "order_processing_low_sat.behavior"


@pytest.fixture(scope="session")
def high_model():
    return load_model(str(HIGH))


@pytest.fixture(scope="session")
def low_unsat_model():
    return load_model(str(LOW_UNSAT))


@pytest.fixture(scope="session")
def low_sat_model():
    return load_model(str(LOW_SAT))


@pytest.fixture(scope="session")
def low_unsat_system(low_unsat_model):
    return build_system(generate_smv(low_unsat_model))


@pytest.fixture(scope="session")
def low_sat_system(low_sat_model):
    return build_system(generate_smv(low_sat_model))


def random_valid_model(seed: int, max_nodes: int = 10) -> ActivityModel:
    """Deterministic well-formed acyclic model for a seed.

    Nodes are laid out in a topological line and all edges point forward,
    so the result is acyclic by construction; arity minimums are satisfied
    by a connectivity pass (one incoming each), a second-incoming pass for
    merges and joins, and a fan-out pass for forks and decisions.
    """
    rng = random.Random(seed)
    for _ in range(300):
        model = _try_build(rng, max_nodes)
        if model is not None and not validate(model):
            assert is_acyclic(model)
            return model
    raise AssertionError(f"no valid model for seed {seed}")


def _try_build(rng: random.Random, max_nodes: int) -> ActivityModel | None:
    n = rng.randint(3, max_nodes)
    kinds = [NodeKind.INITIAL]
    for i in range(1, n - 1):
        feasible = [NodeKind.ACTION, NodeKind.ACTION, NodeKind.ACTION, NodeKind.FINAL]
        if i <= n - 3:
            feasible += [NodeKind.FORK, NodeKind.DECISION]
        if i >= 2:
            feasible += [NodeKind.MERGE, NodeKind.JOIN]
        kinds.append(rng.choice(feasible))
    kinds.append(NodeKind.FINAL)

    out_cap, out_min = [], []
    for kind in kinds:
        if kind is NodeKind.FINAL:
            out_cap.append(0), out_min.append(0)
        elif kind in (NodeKind.FORK, NodeKind.DECISION):
            out_cap.append(3), out_min.append(2)
        else:
            out_cap.append(1), out_min.append(1)

    edges: list[tuple[int, int]] = []
    out_used = [0] * n

    def targets_of(i: int) -> set[int]:
        return {j for s, j in edges if s == i}

    for j in range(1, n):  # one incoming edge each, from an earlier node
        candidates = [i for i in range(j) if out_used[i] < out_cap[i]]
        if not candidates:
            return None
        i = rng.choice(candidates)
        edges.append((i, j))
        out_used[i] += 1
    for j in range(n):  # merges and joins need a second incoming edge
        if kinds[j] in (NodeKind.MERGE, NodeKind.JOIN):
            candidates = [
                i for i in range(j) if out_used[i] < out_cap[i] and j not in targets_of(i)
            ]
            if not candidates:
                return None
            i = rng.choice(candidates)
            edges.append((i, j))
            out_used[i] += 1
    for i in range(n):  # forks and decisions need their fan-out
        while out_used[i] < out_min[i]:
            candidates = [
                j
                for j in range(i + 1, n)
                if kinds[j] is not NodeKind.INITIAL and j not in targets_of(i)
            ]
            if not candidates:
                return None
            j = rng.choice(candidates)
            edges.append((i, j))
            out_used[i] += 1
    for _ in range(rng.randint(0, 2)):  # occasional implicit joins
        sources = [i for i in range(n) if out_used[i] < out_cap[i]]
        if not sources:
            break
        i = rng.choice(sources)
        candidates = [j for j in range(i + 1, n) if j not in targets_of(i)]
        if not candidates:
            continue
        j = rng.choice(candidates)
        edges.append((i, j))
        out_used[i] += 1

    names = [f"N{i}" for i in range(n)]
    return ActivityModel(
        "RandomModel",
        [Node(names[i], kinds[i]) for i in range(n)],
        [Edge(names[i], names[j]) for i, j in edges],
    )


def random_digraph(seed: int, max_nodes: int = 12) -> ActivityModel:
    """Arbitrary directed graph (cycles allowed, validity not guaranteed)
    packaged as a model, for exercising graph algorithms alone."""
    rng = random.Random(seed)
    n = rng.randint(1, max_nodes)
    names = [f"G{i}" for i in range(n)]
    nodes = [Node(name, NodeKind.ACTION) for name in names]
    edges = []
    for _ in range(rng.randint(0, 2 * n)):
        edges.append(Edge(rng.choice(names), rng.choice(names)))
    return ActivityModel("RandomDigraph", nodes, edges)


def lasso_violates(formula, lasso) -> bool:
    """Re-evaluate a reported counterexample from its printable states
    alone (no transition system involved)."""
    from containcheck.checker import evaluate_on_lasso

    index = {name: i for i, name in enumerate(lasso.var_names)}

    def atom_value(row, name):
        return row[index[name]] == "TRUE"

    return evaluate_on_lasso(formula, lasso.prefix, lasso.loop, atom_value) is False
