import random
from fractions import Fraction

from mmcast.lp import LinearProgram, SimplexSolver, solve_lp

F = Fraction


def test_lower_bound_only():
    lp = LinearProgram([1], [([1], ">=", 3), ([1], "<=", 10)], [(0, None)])
    s = solve_lp(lp)
    assert (s.status, s.value, s.x) == ("optimal", 3, [3])


def test_equality_vertex_deterministic():
    lp = LinearProgram([1, 1], [([1, 1], "==", 1)], [(0, None), (0, None)])
    s = solve_lp(lp)
    assert s.value == 1
    assert s.x == [1, 0]      # pinned: deterministic pivoting picks this vertex


def test_infeasible():
    lp = LinearProgram([0], [([1], ">=", 1), ([1], "<=", 0)], [(0, None)])
    assert solve_lp(lp).status == "infeasible"


def test_unbounded():
    lp = LinearProgram([-1], [], [(0, None)])
    assert solve_lp(lp).status == "unbounded"


def test_free_and_flipped_variables():
    lp = LinearProgram([1, -1], [([1, 0], ">=", -5), ([0, 1], "<=", 7)],
                       [(None, None), (None, 7)])
    s = solve_lp(lp)
    assert s.value == -12
    assert s.x == [-5, 7]


def test_exact_rationals():
    lp = LinearProgram([F(1, 3), F(1, 7)],
                       [([F(2, 5), 1], ">=", F(9, 10))],
                       [(0, None), (0, None)])
    s = solve_lp(lp)
    assert s.status == "optimal"
    # cheapest unit of constraint satisfaction: compare the two column rates
    assert s.value == min(F(1, 3) / F(2, 5), F(1, 7)) * F(9, 10)


def _random_primal_dual(rng):
    n, m = rng.randint(1, 4), rng.randint(1, 4)
    a = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)]
    c = [F(rng.randint(0, 5)) for _ in range(n)]
    x0 = [F(rng.randint(0, 3)) for _ in range(n)]
    b = [sum(row[j] * x0[j] for j in range(n)) - F(rng.randint(0, 3)) for row in a]
    primal = LinearProgram(c, [(row, ">=", bi) for row, bi in zip(a, b)],
                           [(0, None)] * n)
    dual = LinearProgram(
        [-bi for bi in b],
        [([a[i][j] for i in range(m)], "<=", c[j]) for j in range(n)],
        [(0, None)] * m)
    return primal, dual


def test_strong_duality_random():
    rng = random.Random(67)
    checked = 0
    for _ in range(60):
        primal, dual = _random_primal_dual(rng)
        ps = solve_lp(primal)
        ds = solve_lp(dual)
        if ps.status != "optimal" or ds.status != "optimal":
            continue
        checked += 1
        assert ps.value == -ds.value
    assert checked >= 30


def _exact_rank(rows):
    rows = [list(r) for r in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    used = [False] * len(rows)
    for c in range(cols):
        pivot = next((i for i in range(len(rows)) if not used[i] and rows[i][c] != 0), None)
        if pivot is None:
            continue
        used[pivot] = True
        rank += 1
        inv = rows[pivot][c]
        rows[pivot] = [v / inv for v in rows[pivot]]
        for i in range(len(rows)):
            if i != pivot and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [u - factor * v for u, v in zip(rows[i], rows[pivot])]
    return rank


def test_solution_is_a_vertex():
    # the active constraints (rows + bounds) at the optimum span all variables
    rng = random.Random(71)
    checked = 0
    for _ in range(40):
        n, m = rng.randint(1, 4), rng.randint(1, 5)
        rows = []
        for _ in range(m):
            coeffs = [F(rng.randint(-2, 3)) for _ in range(n)]
            rows.append((coeffs, rng.choice(["<=", ">="]), F(rng.randint(-4, 8))))
        lp = LinearProgram([F(rng.randint(-3, 3)) for _ in range(n)], rows,
                           [(0, 6)] * n)
        s = solve_lp(lp)
        if s.status != "optimal":
            continue
        checked += 1
        active = []
        for coeffs, rel, rhs in lp.rows:
            lhs = sum(cj * xj for cj, xj in zip(coeffs, s.x))
            if lhs == rhs:
                active.append(coeffs)
        for j, xj in enumerate(s.x):
            if xj in (F(0), F(6)):
                active.append([F(1) if i == j else F(0) for i in range(n)])
        assert _exact_rank(active) == n
    assert checked >= 20


def test_resolve_reuses_constraints():
    lp = LinearProgram([1, 1], [([1, 1], ">=", 2), ([1, -1], "<=", 1)],
                       [(0, 5), (0, 5)])
    solver = SimplexSolver(lp)
    first = solver.solve()
    assert first.value == 2
    assert solver.resolve([F(3), F(1)]).value == 2
    assert solver.resolve([F(-1), F(-1)]).value == -10


def test_deterministic_repeat():
    rng = random.Random(73)
    for _ in range(10):
        primal, _ = _random_primal_dual(rng)
        a = solve_lp(primal)
        b = solve_lp(primal)
        assert (a.status, a.value, a.x) == (b.status, b.value, b.x)


def test_against_independent_float_solver():
    # scipy's HiGHS as an unrelated implementation; values agree to float accuracy
    from scipy.optimize import linprog
    rng = random.Random(79)
    compared = 0
    for _ in range(80):
        n, m = rng.randint(1, 5), rng.randint(1, 5)
        rows = []
        for _ in range(m):
            coeffs = [F(rng.randint(-3, 3)) for _ in range(n)]
            rows.append((coeffs, rng.choice(["<=", ">="]), F(rng.randint(-5, 8))))
        c = [F(rng.randint(-4, 4)) for _ in range(n)]
        lp = LinearProgram(c, rows, [(0, 7)] * n)
        mine = solve_lp(lp)
        a_ub, b_ub = [], []
        for coeffs, rel, rhs in rows:
            sign = 1 if rel == "<=" else -1
            a_ub.append([sign * float(x) for x in coeffs])
            b_ub.append(sign * float(rhs))
        ref = linprog([float(x) for x in c], A_ub=a_ub, b_ub=b_ub,
                      bounds=[(0, 7)] * n, method="highs")
        if mine.status == "optimal":
            assert ref.status == 0
            assert abs(float(mine.value) - ref.fun) < 1e-7
            compared += 1
        elif mine.status == "infeasible":
            assert ref.status == 2
    assert compared >= 20


def test_fuzz_mixed_relations_and_bounds():
    # random LPs with equalities and one-sided/free bounds: returned optima
    # must satisfy every row exactly, and statuses must match scipy
    from scipy.optimize import linprog
    rng = random.Random(83)
    agreements = 0
    for _ in range(120):
        n = rng.randint(1, 4)
        m = rng.randint(0, 4)
        bounds = []
        for _ in range(n):
            lo = rng.choice([None, F(rng.randint(-3, 0))])
            hi = rng.choice([None, F(rng.randint(1, 6))])
            bounds.append((lo, hi))
        rows = []
        for _ in range(m):
            coeffs = [F(rng.randint(-3, 3)) for _ in range(n)]
            rows.append((coeffs, rng.choice(["<=", ">=", "=="]), F(rng.randint(-4, 6))))
        c = [F(rng.randint(-3, 3)) for _ in range(n)]
        lp = LinearProgram(c, rows, bounds)
        mine = solve_lp(lp)
        if mine.status == "optimal":
            for coeffs, rel, rhs in rows:
                lhs = sum(a * x for a, x in zip(coeffs, mine.x))
                assert (lhs <= rhs if rel == "<=" else
                        lhs >= rhs if rel == ">=" else lhs == rhs)
            for (lo, hi), x in zip(bounds, mine.x):
                assert lo is None or x >= lo
                assert hi is None or x <= hi
            assert sum(a * x for a, x in zip(c, mine.x)) == mine.value
        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        for coeffs, rel, rhs in rows:
            if rel == "==":
                a_eq.append([float(x) for x in coeffs])
                b_eq.append(float(rhs))
            else:
                sign = 1 if rel == "<=" else -1
                a_ub.append([sign * float(x) for x in coeffs])
                b_ub.append(sign * float(rhs))
        ref = linprog([float(x) for x in c],
                      A_ub=a_ub or None, b_ub=b_ub or None,
                      A_eq=a_eq or None, b_eq=b_eq or None,
                      bounds=[(None if lo is None else float(lo),
                               None if hi is None else float(hi))
                              for lo, hi in bounds],
                      method="highs")
        expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(ref.status)
        if expected is not None:
            assert mine.status == expected
            if expected == "optimal":
                assert abs(float(mine.value) - ref.fun) < 1e-7
            agreements += 1
    assert agreements >= 100
