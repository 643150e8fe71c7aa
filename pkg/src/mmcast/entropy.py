"""Subset entropy oracles for the three supported source models.

A model assigns a joint entropy H(X_S) to every subset S of source nodes:

* ``LinearSource`` -- each node observes a fixed F_q-linear image of a
  uniform data vector; H(X_S) equals the rank of the stacked observation
  matrices, measured in packet units.  Exact.
* ``TabularSource`` -- an explicit subset -> entropy table.  Exact.
* ``PmfSource`` -- a dense joint probability table; marginal Shannon
  entropies in bits, computed in floating point and rationalized to an
  absolute 2**-40 grid (documented approximate path).

The oracle memoizes by subset bitmask, so repeated evaluations during
submodular minimization are cheap and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import gf
from .errors import InvalidInstance, UnknownSubset

MAX_GROUND = 63
PMF_ROUND_BITS = 40
PMF_TABLE_CAP = 2 ** 20


@dataclass(frozen=True)
class LinearSource:
    """Observations X_m = A_m @ W with W uniform over F_q^N."""

    q: int
    n_packets: int                      # N, length of the data vector W
    matrices: dict                      # node -> FieldMatrix (ell_m x N)
    blocklength: int = 1
    unit: str = "packets"

    def __post_init__(self):
        if not gf.is_prime(self.q):
            raise InvalidInstance(f"linear model requires a prime field, got q={self.q}")
        for node, m in self.matrices.items():
            if m.cols != self.n_packets:
                raise InvalidInstance(
                    f"observation matrix of {node} has {m.cols} columns, expected {self.n_packets}")
            if m.q != self.q:
                raise InvalidInstance(f"observation matrix of {node} is over F_{m.q}, expected F_{self.q}")

    def matrix_for(self, node) -> gf.FieldMatrix:
        # absent nodes are relays: zero-row observation, zero entropy
        return self.matrices.get(node, gf.FieldMatrix.zeros(0, self.n_packets, self.q))

    def stacked(self, nodes) -> gf.FieldMatrix:
        m = gf.FieldMatrix.zeros(0, self.n_packets, self.q)
        for node in nodes:
            m = m.stack(self.matrix_for(node))
        return m

    def entropy(self, nodes) -> Fraction:
        return Fraction(gf.rank(self.stacked(nodes)))


@dataclass(frozen=True)
class TabularSource:
    """Explicit subset-entropy table over a fixed ground set."""

    ground: tuple
    entropies: dict                     # frozenset -> Fraction, all nonempty subsets
    unit: str = "packets"

    def entropy(self, nodes) -> Fraction:
        key = frozenset(nodes)
        if not key:
            return Fraction(0)
        if key not in self.entropies:
            raise UnknownSubset(f"no entropy entry for subset {sorted(key)}")
        return self.entropies[key]


@dataclass(frozen=True)
class PmfSource:
    """Dense joint pmf over finite per-node alphabets; entropies in bits."""

    order: tuple                        # node evaluation order for the table
    alphabets: dict                     # node -> alphabet size
    table: dict                         # outcome tuple -> Fraction probability
    unit: str = "bits"

    def __post_init__(self):
        size = 1
        for node in self.order:
            size *= self.alphabets[node]
        if size > PMF_TABLE_CAP:
            raise InvalidInstance(f"joint alphabet size {size} exceeds cap {PMF_TABLE_CAP}")
        total = sum(self.table.values(), Fraction(0))
        if total != 1:
            raise InvalidInstance(f"joint pmf sums to {total}, expected 1")

    @property
    def rounding_slack(self) -> Fraction:
        # entropies are snapped independently; inequality checks on up to
        # four of them must absorb the accumulated grid error
        return Fraction(1, 2 ** (PMF_ROUND_BITS - 2))

    def entropy(self, nodes) -> Fraction:
        keep = [i for i, node in enumerate(self.order) if node in set(nodes)]
        marginal: dict = {}
        for outcome, p in self.table.items():
            if p == 0:
                continue
            k = tuple(outcome[i] for i in keep)
            marginal[k] = marginal.get(k, Fraction(0)) + p
        h = -sum(float(p) * math.log2(float(p)) for p in marginal.values() if p > 0)
        # snap to a fixed binary grid so results are reproducible rationals
        return Fraction(round(h * 2 ** PMF_ROUND_BITS), 2 ** PMF_ROUND_BITS)


@dataclass
class EntropyOracle:
    """Memoizing subset-entropy function over an ordered ground set."""

    ground: tuple
    model: object
    unit: str = "packets"
    _index: dict = field(init=False, repr=False)
    _memo: dict = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.ground) > MAX_GROUND:
            raise InvalidInstance(f"ground set of {len(self.ground)} sources exceeds {MAX_GROUND}")
        self._index = {node: i for i, node in enumerate(self.ground)}
        self._memo = {0: Fraction(0)}

    @classmethod
    def from_model(cls, ground, model) -> "EntropyOracle":
        return cls(tuple(ground), model, unit=model.unit)

    def _mask(self, nodes) -> int:
        mask = 0
        for node in nodes:
            try:
                mask |= 1 << self._index[node]
            except KeyError:
                raise UnknownSubset(f"{node!r} is not in the ground set") from None
        return mask

    def _unmask(self, mask: int) -> tuple:
        return tuple(node for i, node in enumerate(self.ground) if mask >> i & 1)

    def entropy(self, nodes) -> Fraction:
        """H(X_S) for S = nodes, in the oracle's declared unit."""
        mask = self._mask(nodes)
        hit = self._memo.get(mask)
        if hit is None:
            hit = self._memo[mask] = self.model.entropy(self._unmask(mask))
        return hit

    def conditional(self, nodes, within) -> Fraction:
        """H(X_S | X_{G \\ S}) for S = nodes inside the ground subset G = within."""
        g = frozenset(within)
        s = frozenset(nodes)
        if not s <= g:
            raise UnknownSubset(f"{sorted(s - g)} not contained in the conditioning ground set")
        return self.entropy(g) - self.entropy(g - s)


def entropy(oracle: EntropyOracle, nodes) -> Fraction:
    return oracle.entropy(nodes)


def conditional_entropy(oracle: EntropyOracle, nodes, within) -> Fraction:
    return oracle.conditional(nodes, within)


@dataclass
class PolymatroidReport:
    normalized: bool
    monotone_violations: list
    submodular_violations: list
    exhaustive: bool
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return self.normalized and not self.monotone_violations and not self.submodular_violations


def validate_polymatroid(oracle: EntropyOracle, exhaustive_bound: int = 12,
                         samples: int = 2000, seed: int = 0) -> PolymatroidReport:
    """Check H(0)=0, monotonicity and submodularity of the oracle.

    Exhaustive over all subset pairs when the ground set has at most
    ``exhaustive_bound`` elements, otherwise over seeded random pairs.
    Models with an approximate entropy path declare a ``rounding_slack``
    that the inequality checks absorb.
    """
    import random

    n = len(oracle.ground)
    slack = getattr(oracle.model, "rounding_slack", Fraction(0))
    normalized = oracle.entropy(()) == 0
    mono: list = []
    sub: list = []

    def check_pair(a_mask: int, b_mask: int):
        a = oracle._unmask(a_mask)
        b = oracle._unmask(b_mask)
        ha, hb = oracle.entropy(a), oracle.entropy(b)
        cap = oracle.entropy(oracle._unmask(a_mask & b_mask))
        cup = oracle.entropy(oracle._unmask(a_mask | b_mask))
        if cap > ha + slack:  # A cap B is a subset of A and must not exceed its entropy
            mono.append((oracle._unmask(a_mask & b_mask), a, cap, ha))
        if a_mask & b_mask == a_mask and ha > hb + slack:
            mono.append((a, b, ha, hb))
        if ha + hb < cup + cap - slack:
            sub.append((a, b, ha + hb, cup + cap))

    if n <= exhaustive_bound:
        pairs = ((a, b) for a in range(1 << n) for b in range(1 << n))
        count = 0
        for a_mask, b_mask in pairs:
            check_pair(a_mask, b_mask)
            count += 1
        return PolymatroidReport(normalized, mono, sub, True, count)

    rng = random.Random(seed)
    for _ in range(samples):
        check_pair(rng.randrange(1 << n), rng.randrange(1 << n))
    return PolymatroidReport(normalized, mono, sub, False, samples)


def tabular_from_oracle(oracle: EntropyOracle, unit: str | None = None) -> TabularSource:
    """Materialize the full subset table of an oracle (small grounds only)."""
    n = len(oracle.ground)
    if n > 20:
        raise InvalidInstance("ground set too large to tabulate")
    table = {}
    for mask in range(1, 1 << n):
        nodes = oracle._unmask(mask)
        table[frozenset(nodes)] = oracle.entropy(nodes)
    return TabularSource(oracle.ground, table, unit=unit or oracle.unit)


def pmf_from_nested(order, alphabets, nested) -> PmfSource:
    """Build a PmfSource from a nested-list table in the given node order."""
    order = tuple(order)
    sizes = [alphabets[node] for node in order]
    table = {}
    for outcome in product(*[range(s) for s in sizes]):
        cell = nested
        for i in outcome:
            cell = cell[i]
        p = cell if isinstance(cell, Fraction) else Fraction(cell)
        if p < 0:
            raise InvalidInstance("negative probability in pmf table")
        if p:
            table[outcome] = p
    return PmfSource(order, dict(alphabets), table)
