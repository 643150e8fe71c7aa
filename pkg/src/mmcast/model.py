"""Network instances, client subgraphs and the boundary operator.

An instance is a capacitated, cost-weighted DAG whose sinks are the
clients and whose remaining nodes all count as sources (relay nodes are
sources with an empty observation).  All capacities, costs and rates are
exact rationals in the entropy unit of the attached source model
("packets" for the linear model).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (ClientNotSink, CycleDetected, DuplicateEdgeId, EmptyReachableSet,
                     InvalidInstance, NegativeCapacity, NonpositiveCost, UnknownEdgeRate)


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    capacity: Fraction
    cost: Fraction


@dataclass(frozen=True)
class NetworkInstance:
    nodes: tuple               # all node ids, in input order
    edges: tuple               # Edge tuples, in input order
    sources: tuple             # every non-client node, in topological order
    clients: tuple             # sink nodes, in input order
    topo_order: tuple          # fixed topological order reused downstream

    def edge_map(self) -> dict:
        return {e.id: e for e in self.edges}

    def capacities(self) -> dict:
        return {e.id: e.capacity for e in self.edges}

    def costs(self) -> dict:
        return {e.id: e.cost for e in self.edges}


@dataclass(frozen=True)
class ClientSubproblem:
    client: str
    sources: tuple             # M_t: sources reaching the client, topological order
    edges: tuple               # E_t: edges with tail in M_t and head in M_t + {t}
    ground_entropy: Fraction   # H(X_{M_t})


def parse_rational(value) -> Fraction:
    """Accept ints and decimal/ratio strings; reject binary floats."""
    if isinstance(value, bool):
        raise InvalidInstance(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if value != int(value):
            raise InvalidInstance(
                f"non-integer float {value!r}: use a decimal string for exact rationals")
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"cannot parse rational from {value!r}") from exc
    raise InvalidInstance(f"cannot parse rational from {value!r}")


def _topological_order(nodes, edges) -> tuple:
    """Kahn's algorithm, input order as tie-break; raises with a witness cycle."""
    indeg = {v: 0 for v in nodes}
    succ = {v: [] for v in nodes}
    for e in edges:
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    order = []
    ready = [v for v in nodes if indeg[v] == 0]
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) < len(nodes):
        remaining = {v for v in nodes if indeg[v] > 0}
        pred = {v: [] for v in nodes}
        for e in edges:
            pred[e.head].append(e.tail)
        # every remaining node keeps a predecessor in the remaining set, so
        # walking predecessors must revisit a node and exposes a cycle
        seen = {}
        path = []
        v = next(iter(sorted(remaining, key=nodes.index)))
        while v not in seen:
            seen[v] = len(path)
            path.append(v)
            v = next(u for u in pred[v] if u in remaining)
        loop = path[seen[v]:]
        cycle = [v] + loop[::-1]  # reverse the predecessor walk into edge order
        raise CycleDetected(cycle)
    return tuple(order)


def validate_instance(raw: dict) -> NetworkInstance:
    """Build a validated instance from a parsed description.

    The description uses the documented JSON shape: ``nodes``, ``edges``
    (each with id/tail/head/capacity/cost), ``clients``.  Every non-client
    node becomes a source.
    """
    try:
        node_list = [str(v) for v in raw["nodes"]]
        edge_list = raw["edges"]
        client_list = [str(v) for v in raw["clients"]]
    except (KeyError, TypeError) as exc:
        raise InvalidInstance(f"missing or malformed instance key: {exc}") from exc

    if len(set(node_list)) != len(node_list):
        raise InvalidInstance("duplicate node ids")
    node_set = set(node_list)

    edges = []
    seen_ids = set()
    for entry in edge_list:
        try:
            eid, tail, head = str(entry["id"]), str(entry["tail"]), str(entry["head"])
            capacity = parse_rational(entry["capacity"])
            cost = parse_rational(entry["cost"])
        except (KeyError, TypeError) as exc:
            raise InvalidInstance(f"malformed edge entry {entry!r}") from exc
        if eid in seen_ids:
            raise DuplicateEdgeId(f"edge id {eid!r} appears twice")
        seen_ids.add(eid)
        if tail not in node_set or head not in node_set:
            raise InvalidInstance(f"edge {eid} references unknown node")
        if tail == head:
            raise InvalidInstance(f"edge {eid} is a self-loop")
        if capacity < 0:
            raise NegativeCapacity(f"edge {eid} has capacity {capacity}")
        if cost <= 0:
            raise NonpositiveCost(f"edge {eid} has cost {cost}")
        edges.append(Edge(eid, tail, head, capacity, cost))

    clients = tuple(client_list)
    client_set = set(clients)
    if len(client_set) != len(clients):
        raise InvalidInstance("duplicate client ids")
    if not client_set <= node_set:
        raise InvalidInstance("client list references unknown node")

    out_deg = {v: 0 for v in node_list}
    in_deg = {v: 0 for v in node_list}
    for e in edges:
        out_deg[e.tail] += 1
        in_deg[e.head] += 1
    for t in clients:
        if out_deg[t] > 0:
            raise ClientNotSink(f"client {t} has outgoing edges")
        if in_deg[t] == 0:
            raise InvalidInstance(f"client {t} has no incoming edges")

    topo = _topological_order(node_list, edges)
    sources = tuple(v for v in topo if v not in client_set)
    return NetworkInstance(tuple(node_list), tuple(edges), sources, clients, topo)


def reachable_sources(instance: NetworkInstance, t: str) -> tuple:
    """M_t: all sources with a directed path to t, in topological order."""
    pred = {v: [] for v in instance.nodes}
    for e in instance.edges:
        pred[e.head].append(e.tail)
    seen = {t}
    frontier = [t]
    while frontier:
        v = frontier.pop()
        for u in pred[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    client_set = set(instance.clients)
    return tuple(v for v in instance.topo_order if v in seen and v not in client_set)


def client_subproblem(instance: NetworkInstance, oracle, t: str) -> ClientSubproblem:
    """Restrict the instance to the sources and edges that can serve client t."""
    if t not in instance.clients:
        raise InvalidInstance(f"{t!r} is not a client of this instance")
    m_t = reachable_sources(instance, t)
    if not m_t:
        raise EmptyReachableSet(f"client {t} has no reachable sources")
    keep = set(m_t) | {t}
    e_t = tuple(e for e in instance.edges if e.tail in set(m_t) and e.head in keep)
    return ClientSubproblem(t, m_t, e_t, oracle.entropy(m_t))


def boundary(rates: dict, nodes, edges) -> Fraction:
    """Net rate leaving the node set: sum over edges out of S minus edges into S."""
    s = set(nodes)
    total = Fraction(0)
    for e in edges:
        out_of_s = e.tail in s and e.head not in s
        into_s = e.head in s and e.tail not in s
        if not (out_of_s or into_s):
            continue
        if e.id not in rates:
            raise UnknownEdgeRate(f"no rate for edge {e.id}")
        total += rates[e.id] if out_of_s else -rates[e.id]
    return total


def boundary_vector(rates: dict, sub: ClientSubproblem) -> dict:
    """Per-source singleton boundaries; their sums give every subset boundary."""
    return {m: boundary(rates, (m,), sub.edges) for m in sub.sources}


def cut_capacity(capacities: dict, nodes, edges) -> Fraction:
    """Total capacity of edges leaving the node set (within the given edges)."""
    s = set(nodes)
    return sum((capacities[e.id] for e in edges if e.tail in s and e.head not in s),
               Fraction(0))


@dataclass(frozen=True)
class ClientReconstructability:
    client: str
    sources: tuple
    entropy: Fraction
    complete: bool


@dataclass(frozen=True)
class ReconstructabilityReport:
    total_entropy: Fraction
    clients: tuple

    @property
    def ok(self) -> bool:
        return all(c.complete for c in self.clients)


def check_reconstructability(instance: NetworkInstance, oracle) -> ReconstructabilityReport:
    """Check that every client can in principle see the whole process.

    A client passes when the joint entropy of its reachable sources equals
    the joint entropy of all sources.
    """
    total = oracle.entropy(instance.sources)
    rows = []
    for t in instance.clients:
        m_t = reachable_sources(instance, t)
        h = oracle.entropy(m_t)
        rows.append(ClientReconstructability(t, m_t, h, h == total))
    return ReconstructabilityReport(total, tuple(rows))
