"""Minimum-cost rate allocation for a single client.

The feasible set is the client's rate-flow region: every source subset S
must satisfy boundary(R, S) >= H(X_S | X_rest), with equality at the full
source set, intersected with the capacity box.  Two solvers cover it:

* :func:`solve_single_client` -- cutting planes.  The LP starts from a
  small constraint pool (singletons, their complements, the ground
  equality) and grows it with the most violated subset found by exact
  submodular minimization until none is violated.
* :func:`solve_single_client_bruteforce` -- materializes all 2^m - 2
  subset inequalities at once; the oracle baseline the cutting-plane
  path is tested against.

Both return exact rational optima.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import model, submodular
from .errors import GroundTooLarge, Infeasible
from .lp import LinearProgram, SimplexSolver
from .model import ClientSubproblem
from .submodular import SetFunction, conditional_entropy_function, sfm_brute_force

BRUTE_FORCE_SOURCES = 16


@dataclass
class SingleClientSolution:
    rates: dict                 # edge id -> Fraction on E_t
    cost: Fraction
    tight_sets: list            # subsets whose region inequality is tight
    iterations: int             # LP solves performed


def _subset(sources: tuple, mask: int) -> tuple:
    return tuple(e for i, e in enumerate(sources) if mask >> i & 1)


def boundary_row(sub: ClientSubproblem, mask: int) -> list:
    """LP coefficients of boundary(R, S) over the subproblem's edge order."""
    s = set(_subset(sub.sources, mask))
    row = []
    for e in sub.edges:
        if e.tail in s and e.head not in s:
            row.append(Fraction(1))
        elif e.head in s and e.tail not in s:
            row.append(Fraction(-1))
        else:
            row.append(Fraction(0))
    return row


class RegionOptimizer:
    """Repeatedly minimize linear objectives over one client's region.

    Keeps the constraint pool and the simplex basis across calls, so the
    Lagrangian inner problems (same region, changing weights) cost a few
    warm pivots each after the pool stabilizes.
    """

    def __init__(self, sub: ClientSubproblem, oracle, capacities: dict):
        self.sub = sub
        self.capacities = capacities
        self.g = conditional_entropy_function(oracle, sub.sources)
        m = len(sub.sources)
        self.full_mask = (1 << m) - 1
        pool = [1 << i for i in range(m)]
        pool += [self.full_mask ^ (1 << i) for i in range(m) if m > 1]
        self.pool = sorted(set(pool) - {0, self.full_mask})
        self._solver = None

    def _build(self, objective: list) -> SimplexSolver:
        sub = self.sub
        rows = [(boundary_row(sub, mask), ">=", self.g.value(mask)) for mask in self.pool]
        rows.append((boundary_row(sub, self.full_mask), "==", sub.ground_entropy))
        bounds = [(Fraction(0), self.capacities[e.id]) for e in sub.edges]
        solver = SimplexSolver(LinearProgram(objective, rows, bounds))
        return solver

    def minimize(self, costs: dict):
        """Exact minimum of sum(costs[e] * R_e) over the region.

        Returns (rates, value, lp_solves); raises Infeasible when the
        region is empty within the capacity box.
        """
        objective = [Fraction(costs[e.id]) for e in self.sub.edges]
        solves = 0
        while True:
            if self._solver is None:
                self._solver = self._build(objective)
                solution = self._solver.solve()
            else:
                solution = self._solver.resolve(objective)
            solves += 1
            if solution.status == "infeasible":
                self._solver = None
                raise Infeasible(f"client {self.sub.client}: region is empty under capacities")
            rates = {e.id: x for e, x in zip(self.sub.edges, solution.x)}
            violated = self._most_violated(rates)
            if violated is None:
                return rates, solution.value, solves
            self.pool.append(violated)
            self._solver = None

    def _most_violated(self, rates: dict):
        """Mask of the subset minimizing boundary(R, S) - g(S), if negative."""
        sub = self.sub

        def slack(nodes):
            return model.boundary(rates, nodes, sub.edges) - self.g.evaluate(nodes)

        h = SetFunction(sub.sources, slack, "submodular")
        witness, worst = sfm_brute_force(h)
        if worst >= 0:
            return None
        mask = 0
        index = {m: i for i, m in enumerate(sub.sources)}
        for v in witness:
            mask |= 1 << index[v]
        return mask

    def tight_sets(self, rates: dict) -> list:
        tight = []
        for mask in sorted(self.pool) + [self.full_mask]:
            nodes = _subset(self.sub.sources, mask)
            if model.boundary(rates, nodes, self.sub.edges) == self.g.value(mask):
                tight.append(nodes)
        return tight


def solve_single_client(sub: ClientSubproblem, oracle, costs: dict, capacities: dict,
                        check_feasibility: bool = True) -> SingleClientSolution:
    """Cutting-plane optimum of the single-client allocation problem."""
    if check_feasibility:
        from . import feasibility
        cert = feasibility.check_feasible_single(sub, oracle, capacities)
        if not cert.feasible:
            raise Infeasible(
                f"client {sub.client}: subset {cert.witness_set} needs rate "
                f"{cert.required} but has cut capacity {cert.cut}", (cert,))
    opt = RegionOptimizer(sub, oracle, capacities)
    rates, value, solves = opt.minimize(costs)
    membership = submodular.in_base_polyhedron(model.boundary_vector(rates, sub), opt.g)
    if not membership:
        raise RuntimeError(
            f"optimizer postcondition failed at subset {membership.violating_set}")
    return SingleClientSolution(rates, value, opt.tight_sets(rates), solves)


def solve_single_client_bruteforce(sub: ClientSubproblem, oracle, costs: dict,
                                   capacities: dict) -> SingleClientSolution:
    """Oracle baseline: one LP with every subset inequality materialized."""
    m = len(sub.sources)
    if m > BRUTE_FORCE_SOURCES:
        raise GroundTooLarge(f"{m} sources exceeds brute-force limit {BRUTE_FORCE_SOURCES}")
    g = conditional_entropy_function(oracle, sub.sources)
    full = (1 << m) - 1
    rows = []
    for mask in range(1, full):
        base = boundary_row(sub, mask)
        rhs = g.value(mask)
        if rhs <= 0 and all(c >= 0 for c in base):
            continue                # implied by the nonnegativity bounds
        rows.append((base, ">=", rhs))
    rows.append((boundary_row(sub, full), "==", sub.ground_entropy))
    bounds = [(Fraction(0), capacities[e.id]) for e in sub.edges]
    objective = [Fraction(costs[e.id]) for e in sub.edges]
    solution = SimplexSolver(LinearProgram(objective, rows, bounds)).solve()
    if solution.status == "infeasible":
        raise Infeasible(f"client {sub.client}: region is empty under capacities")
    rates = {e.id: x for e, x in zip(sub.edges, solution.x)}
    tight = [_subset(sub.sources, mask) for mask in range(1, full + 1)
             if model.boundary(rates, _subset(sub.sources, mask), sub.edges) == g.value(mask)]
    return SingleClientSolution(rates, solution.value, tight, 1)
