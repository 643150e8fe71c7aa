"""Dense linear algebra over prime fields F_q.

Elements are plain integers reduced mod q; :class:`FieldMatrix` stores a
row-major tuple of them together with the shared modulus.  Everything here
is exact; matrices are never mutated in place by the public operations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DivisionByZero, Inconsistent, ModulusMismatch


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldElement:
    """An element of F_q, value reduced into [0, q)."""

    value: int
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ModulusMismatch(f"modulus {self.q} is not prime")
        object.__setattr__(self, "value", self.value % self.q)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise ModulusMismatch(f"mixed moduli {self.q} and {other.q}")
            return other
        return FieldElement(int(other), self.q)

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value + other.value, self.q)

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value - other.value, self.q)

    def __mul__(self, other):
        other = self._coerce(other)
        return FieldElement(self.value * other.value, self.q)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.value == 0:
            raise DivisionByZero(f"division by zero in F_{self.q}")
        return self * other.inverse()

    def __neg__(self):
        return FieldElement(-self.value, self.q)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.q}")
        return FieldElement(pow(self.value, self.q - 2, self.q), self.q)


def field_arithmetic(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply one of {add, sub, mul, div} to two elements of the same field."""
    if a.q != b.q:
        raise ModulusMismatch(f"mixed moduli {a.q} and {b.q}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


class FieldMatrix:
    """Immutable r x c matrix over F_q with integer entries in [0, q)."""

    __slots__ = ("rows", "cols", "q", "_data")

    def __init__(self, rows: int, cols: int, entries, q: int):
        if not is_prime(q):
            raise ModulusMismatch(f"modulus {q} is not prime")
        data = tuple(int(x) % q for x in entries)
        if len(data) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
        self.rows = rows
        self.cols = cols
        self.q = q
        self._data = data

    @classmethod
    def from_rows(cls, row_lists, q: int, cols: int | None = None) -> "FieldMatrix":
        row_lists = [list(r) for r in row_lists]
        if row_lists:
            cols = len(row_lists[0])
        elif cols is None:
            cols = 0
        flat = [x for r in row_lists for x in r]
        return cls(len(row_lists), cols, flat, q)

    @classmethod
    def identity(cls, n: int, q: int) -> "FieldMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)], q)

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> "FieldMatrix":
        return cls(rows, cols, [0] * (rows * cols), q)

    def __getitem__(self, idx):
        i, j = idx
        return self._data[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self._data[i * self.cols:(i + 1) * self.cols]

    def to_lists(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, FieldMatrix) and self.q == other.q
                and self.rows == other.rows and self.cols == other.cols
                and self._data == other._data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.q, self._data))

    def __repr__(self):
        return f"FieldMatrix({self.rows}x{self.cols} over F_{self.q})"

    def _check_same_field(self, other: "FieldMatrix"):
        if self.q != other.q:
            raise ModulusMismatch(f"mixed moduli {self.q} and {other.q}")

    def sub(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in sub")
        return FieldMatrix(self.rows, self.cols,
                           [(a - b) % self.q for a, b in zip(self._data, other._data)],
                           self.q)

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(
            self.cols, self.rows,
            [self[i, j] for j in range(self.cols) for i in range(self.rows)],
            self.q)

    def stack(self, other: "FieldMatrix") -> "FieldMatrix":
        """Vertical concatenation [self; other]."""
        self._check_same_field(other)
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        return FieldMatrix(self.rows + other.rows, self.cols,
                           self._data + other._data, self.q)

    def matmul(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        q = self.q
        out = []
        ot = other.transpose()
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                cj = ot.row(j)
                out.append(sum(a * b for a, b in zip(ri, cj)) % q)
        return FieldMatrix(self.rows, other.cols, out, q)

    def __matmul__(self, other):
        return self.matmul(other)

    def select_columns(self, indices) -> "FieldMatrix":
        indices = list(indices)
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            out.extend(ri[j] for j in indices)
        return FieldMatrix(self.rows, len(indices), out, self.q)

    def mat_vec(self, vec) -> list:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        q = self.q
        return [sum(a * b for a, b in zip(self.row(i), vec)) % q
                for i in range(self.rows)]


def _forward_eliminate(work: list, q: int, cols: int):
    """Row-reduce ``work`` in place; returns list of (pivot_row, pivot_col).

    The pivot in each column is the first row (in order) with a nonzero
    entry, so reduced forms are reproducible.
    """
    pivots = []
    r = 0
    nrows = len(work)
    for c in range(cols):
        pivot = None
        for i in range(r, nrows):
            if work[i][c] % q != 0:
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = pow(work[r][c], q - 2, q)
        work[r] = [(x * inv) % q for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][c] % q != 0:
                factor = work[i][c]
                work[i] = [(a - factor * b) % q for a, b in zip(work[i], work[r])]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    return pivots


def rank(m: FieldMatrix) -> int:
    """Rank via Gaussian elimination; the input matrix is not mutated."""
    work = [list(m.row(i)) for i in range(m.rows)]
    return len(_forward_eliminate(work, m.q, m.cols))


def independent_rows(m: FieldMatrix) -> list:
    """Indices of a row basis: greedy scan keeping each row that increases rank."""
    q = m.q
    basis_rows: list = []
    kept = []
    for i in range(m.rows):
        trial = basis_rows + [list(m.row(i))]
        work = [row[:] for row in trial]
        if len(_forward_eliminate(work, q, m.cols)) > len(basis_rows):
            basis_rows = trial
            kept.append(i)
    return kept


def solve_right(m: FieldMatrix, y: FieldMatrix) -> FieldMatrix:
    """Solve m @ x = y for x; free variables (if any) are set to zero.

    Raises :class:`Inconsistent` when no solution exists.
    """
    m._check_same_field(y)
    if m.rows != y.rows:
        raise ValueError("row mismatch between system and right-hand side")
    q = m.q
    ncols = m.cols + y.cols
    work = [list(m.row(i)) + list(y.row(i)) for i in range(m.rows)]
    pivots = _forward_eliminate(work, q, m.cols)
    pivot_rows = {r for r, _ in pivots}
    for i in range(m.rows):
        if i not in pivot_rows and any(work[i][m.cols:]):
            raise Inconsistent("system has no solution")
    x = [[0] * y.cols for _ in range(m.cols)]
    for r, c in pivots:
        x[c] = [work[r][m.cols + j] % q for j in range(y.cols)]
    return FieldMatrix(m.cols, y.cols, [v for row in x for v in row], q)


def inverse(m: FieldMatrix) -> FieldMatrix:
    """Inverse of a square matrix; raises Inconsistent when singular."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    if rank(m) < m.rows:
        raise Inconsistent("matrix is singular")
    return solve_right(m, FieldMatrix.identity(m.rows, m.q))
