"""Shared test utilities: fixture paths and seeded random generators."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from mmcast import load_instance
from mmcast.submodular import SetFunction

REPO = Path(__file__).resolve().parent.parent
FIXTURE_F2 = REPO / "fixtures" / "fixture-F2.json"


def load_f2():
    return load_instance(FIXTURE_F2)


def chain_instance(cap1="4", cap2="4", cost1="1", cost2="1") -> dict:
    """Two-source chain: m1 holds packet a, m2 holds packet b, one client."""
    return {
        "nodes": ["m1", "m2", "t"],
        "edges": [
            {"id": "c1", "tail": "m1", "head": "m2", "capacity": cap1, "cost": cost1},
            {"id": "c2", "tail": "m2", "head": "t", "capacity": cap2, "cost": cost2},
        ],
        "clients": ["t"],
        "source_model": {"kind": "linear", "q": 5, "N": 2,
                         "matrices": {"m1": [[1, 0]], "m2": [[0, 1]]}},
    }


def single_edge_instance(entropy_rows=3, capacity="3", cost="1") -> dict:
    """One source holding `entropy_rows` packets, one edge to one client."""
    n = entropy_rows
    return {
        "nodes": ["m", "t"],
        "edges": [{"id": "e", "tail": "m", "head": "t", "capacity": capacity, "cost": cost}],
        "clients": ["t"],
        "source_model": {"kind": "linear", "q": 5, "N": n,
                         "matrices": {"m": [[1 if j == i else 0 for j in range(n)]
                                            for i in range(n)]}},
    }


def random_instance_doc(rng: random.Random, n_sources: int | None = None,
                        n_clients: int | None = None, max_capacity: int = 5,
                        max_cost: int = 3) -> dict:
    """Random DAG with 0/1 selector sources over q=5.

    A source chain backbone plus an edge from the last source into every
    client keeps all sources reachable from every client, so the
    reconstructability precondition always holds; capacities in
    [0, max_capacity] make feasibility genuinely vary.
    """
    m = n_sources if n_sources is not None else rng.randint(2, 6)
    k = n_clients if n_clients is not None else rng.randint(1, 2)
    n_packets = rng.randint(3, 5)
    sources = [f"s{i}" for i in range(1, m + 1)]
    clients = [f"t{j}" for j in range(1, k + 1)]
    edges = []

    def add(u, v):
        edges.append({"id": f"e{len(edges) + 1}", "tail": u, "head": v,
                      "capacity": str(rng.randint(0, max_capacity)),
                      "cost": str(rng.randint(1, max_cost))})

    for i in range(m - 1):
        add(sources[i], sources[i + 1])
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < 0.25:
                add(sources[i], sources[j])
    for t in clients:
        add(sources[-1], t)
        for i in range(m - 1):
            if rng.random() < 0.35:
                add(sources[i], t)

    matrices = {}
    for s in sources:
        rows = [[1 if j == i else 0 for j in range(n_packets)]
                for i in range(n_packets) if rng.random() < 0.5]
        if rows:
            matrices[s] = rows
    return {"nodes": sources + clients, "edges": edges, "clients": clients,
            "source_model": {"kind": "linear", "q": 5, "N": n_packets,
                             "matrices": matrices}}


def random_feasible_instance(rng: random.Random, **kwargs):
    """Loaded (instance, oracle, model) triple that passes the feasibility test."""
    from mmcast import check_feasible_multi

    while True:
        triple = load_instance(random_instance_doc(rng, **kwargs))
        report = check_feasible_multi(triple[0], triple[1])
        if report.feasible:
            return triple


def random_submodular_function(rng: random.Random, n: int) -> SetFunction:
    """Exact random submodular function on ground {0..n-1}.

    Sum of a random directed cut function, a concave-of-cardinality term
    (non-increasing integer increments) and a random modular shift; the
    shift makes minimizers nontrivial while keeping everything rational.
    """
    ground = tuple(range(n))
    arcs = {(i, j): rng.randint(1, 4)
            for i in range(n) for j in range(n)
            if i != j and rng.random() < 0.4}
    increments = sorted((rng.randint(0, 3) for _ in range(n)), reverse=True)
    shift = [rng.randint(-4, 3) for _ in range(n)]

    def evaluate(nodes):
        s = set(nodes)
        cut = sum(w for (i, j), w in arcs.items() if i in s and j not in s)
        size = len(s)
        concave = sum(increments[:size])
        modular = sum(shift[i] for i in s)
        return Fraction(cut + concave + modular)

    return SetFunction(ground, evaluate, "submodular")


def long_chain_doc(n_sources: int, n_clients: int = 1) -> dict:
    """Chain of n_sources relays (first two hold one packet each) into sinks."""
    nodes = [f"s{i}" for i in range(n_sources)]
    clients = [f"t{j}" for j in range(n_clients)]
    edges = [{"id": f"e{i}", "tail": nodes[i], "head": nodes[i + 1],
              "capacity": "5", "cost": "1"} for i in range(n_sources - 1)]
    for j, t in enumerate(clients):
        edges.append({"id": f"sink{j}", "tail": nodes[-1], "head": t,
                      "capacity": "5", "cost": "1"})
    return {"nodes": nodes + clients, "edges": edges, "clients": clients,
            "source_model": {"kind": "linear", "q": 5, "N": 2,
                             "matrices": {nodes[0]: [[1, 0]], nodes[1]: [[0, 1]]}}}
