"""Feasibility of the multicast problem: does an achievable rate vector exist.

For one client the criterion is that every source subset S can push its
innovative information out: cut capacity c(out-edges of S) must cover the
conditional entropy H(X_S | X_{rest}).  The slack function
``c(out(S)) - g(S)`` is submodular, so the worst subset comes from a single
submodular minimization; the whole instance is feasible iff every client's
worst subset has nonnegative slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import model, submodular
from .errors import Infeasible, ReconstructabilityViolated
from .model import ClientSubproblem, NetworkInstance, cut_capacity
from .submodular import SetFunction, conditional_entropy_function, sfm_brute_force


@dataclass(frozen=True)
class FeasibilityCertificate:
    client: str
    feasible: bool
    witness_set: tuple          # argmin of the slack over nonempty subsets
    cut: Fraction               # c(out-edges of witness)
    required: Fraction          # g(witness)
    slack: Fraction             # cut - required; negative iff infeasible

    @property
    def deficit(self) -> Fraction:
        return max(self.required - self.cut, Fraction(0))


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    certificates: tuple

    def by_client(self) -> dict:
        return {c.client: c for c in self.certificates}


def slack_function(sub: ClientSubproblem, oracle, capacities: dict) -> SetFunction:
    """S -> c(out(S)) - g(S) over the client's sources; submodular."""
    g = conditional_entropy_function(oracle, sub.sources)

    def slack(nodes):
        return cut_capacity(capacities, nodes, sub.edges) - g.evaluate(nodes)

    return SetFunction(sub.sources, slack, "submodular")


def check_feasible_single(sub: ClientSubproblem, oracle, capacities: dict) -> FeasibilityCertificate:
    """Certificate for one client: worst subset of the slack function.

    The empty set is skipped (its slack is identically zero).
    """
    f = slack_function(sub, oracle, capacities)
    witness, worst = sfm_brute_force(f, include_empty=False)
    g = conditional_entropy_function(oracle, sub.sources)
    required = g(witness)
    cut = cut_capacity(capacities, witness, sub.edges)
    return FeasibilityCertificate(sub.client, worst >= 0, witness, cut, required, worst)


def check_feasible_multi(instance: NetworkInstance, oracle,
                         capacities: dict | None = None,
                         client_runner=map) -> FeasibilityReport:
    """Per-client certificates plus the overall verdict.

    Requires the reconstructability precondition; certificates are returned
    in instance client order regardless of the runner used.
    """
    recon = model.check_reconstructability(instance, oracle)
    if not recon.ok:
        failed = [c.client for c in recon.clients if not c.complete]
        raise ReconstructabilityViolated(
            f"clients {failed} cannot see the full process", recon)
    caps = capacities if capacities is not None else instance.capacities()

    def one(t):
        sub = model.client_subproblem(instance, oracle, t)
        return check_feasible_single(sub, oracle, caps)

    certs = tuple(client_runner(one, instance.clients))
    return FeasibilityReport(all(c.feasible for c in certs), certs)


def enumerate_feasibility(sub: ClientSubproblem, oracle, capacities: dict) -> FeasibilityCertificate:
    """Reference path: materialize every subset inequality directly.

    Same verdict contract as :func:`check_feasible_single`, kept as an
    independent cross-check route (no submodular machinery).
    """
    g = conditional_entropy_function(oracle, sub.sources)
    n = len(sub.sources)
    best = None
    for mask in range(1, 1 << n):
        nodes = tuple(e for i, e in enumerate(sub.sources) if mask >> i & 1)
        cut = cut_capacity(capacities, nodes, sub.edges)
        required = g(nodes)
        slack = cut - required
        if best is None or slack < best[0]:
            best = (slack, nodes, cut, required)
    slack, nodes, cut, required = best
    return FeasibilityCertificate(sub.client, slack >= 0, nodes, cut, required, slack)


def achievable_point(sub: ClientSubproblem, oracle, capacities: dict) -> dict:
    """A rate vector inside the client's rate-flow region and capacity box.

    Obtained by running the single-client optimizer with unit costs; the
    region membership of the result is re-verified before returning.
    """
    from . import single_client

    cert = check_feasible_single(sub, oracle, capacities)
    if not cert.feasible:
        raise Infeasible(f"client {sub.client} infeasible", (cert,))
    costs = {e.id: Fraction(1) for e in sub.edges}
    solution = single_client.solve_single_client(
        sub, oracle, costs, capacities, check_feasibility=False)
    membership = submodular.in_base_polyhedron(
        model.boundary_vector(solution.rates, sub),
        conditional_entropy_function(oracle, sub.sources))
    if not membership:
        raise Infeasible(
            f"achievable point left the region at {membership.violating_set}", (cert,))
    return solution.rates
