"""Exact simplex solver cross-checked against scipy.optimize.linprog."""

import random
from fractions import Fraction

import pytest

scipy_opt = pytest.importorskip("scipy.optimize")

from dualbound.simplex import FieldOps, solve_lp, verify_farkas


def frac_ops() -> FieldOps:
    return FieldOps(
        zero=Fraction(0),
        one=Fraction(1),
        sign=lambda x: (x > 0) - (x < 0),
    )


def _scipy_solve(c, A, b, maximize):
    # linprog minimizes over A_ub x <= b_ub; our problem is
    # max/min c^T x over A x >= b with free variables.
    obj = [-float(v) for v in c] if maximize else [float(v) for v in c]
    res = scipy_opt.linprog(
        obj,
        A_ub=[[-float(v) for v in row] for row in A],
        b_ub=[-float(v) for v in b],
        bounds=[(None, None)] * len(c),
        method="highs",
    )
    return res


def _random_problem(rng, m, n):
    A = [[Fraction(rng.randint(-4, 4)) for _ in range(n)] for _ in range(m)]
    b = [Fraction(rng.randint(-6, 6)) for _ in range(m)]
    c = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
    return c, A, b


def test_matches_scipy_on_random_problems():
    rng = random.Random(20240817)
    ops = frac_ops()
    statuses = {"optimal": 0, "infeasible": 0, "unbounded": 0}
    for trial in range(60):
        m = rng.randint(2, 6)
        n = rng.randint(1, 4)
        c, A, b = _random_problem(rng, m, n)
        maximize = bool(rng.getrandbits(1))
        got = solve_lp(c, A, b, ops, maximize=maximize)
        ref = _scipy_solve(c, A, b, maximize)
        statuses[got.status] += 1
        if got.status == "optimal":
            assert ref.status == 0, (trial, got.status, ref.status)
            obj = float(got.objective)
            ref_obj = -ref.fun if maximize else ref.fun
            assert abs(obj - ref_obj) < 1e-7 * (1 + abs(ref_obj)), trial
            # reported point satisfies every constraint exactly
            for row, bi in zip(A, b):
                assert sum(r * x for r, x in zip(row, got.x)) >= bi
        elif got.status == "infeasible":
            assert ref.status == 2, (trial, ref.status)
        else:
            assert got.status == "unbounded"
            assert ref.status == 3, (trial, ref.status)
    # the generator should exercise every status at least once
    assert all(v > 0 for v in statuses.values()), statuses


def test_infeasible_produces_valid_farkas_certificate():
    rng = random.Random(7)
    ops = frac_ops()
    seen = 0
    for _ in range(200):
        c, A, b = _random_problem(rng, rng.randint(2, 6), rng.randint(1, 3))
        got = solve_lp(c, A, b, ops)
        if got.status != "infeasible":
            continue
        seen += 1
        assert got.farkas is not None
        assert verify_farkas(A, b, got.farkas, ops)
        if seen >= 15:
            break
    assert seen >= 5


def test_unbounded_ray_improves_objective():
    ops = frac_ops()
    # max x subject to x >= 0: unbounded with ray pointing up
    res = solve_lp([Fraction(1)], [[Fraction(1)]], [Fraction(0)], ops,
                   maximize=True)
    assert res.status == "unbounded"
    assert res.ray is not None and res.ray[0] > 0


def test_degenerate_and_redundant_rows():
    ops = frac_ops()
    # duplicated constraints and a zero objective: must terminate optimally
    A = [[Fraction(1), Fraction(0)], [Fraction(1), Fraction(0)],
         [Fraction(0), Fraction(1)], [Fraction(1), Fraction(1)]]
    b = [Fraction(1)] * 4
    res = solve_lp([Fraction(1), Fraction(1)], A, b, ops)
    assert res.status == "optimal"
    assert res.objective == Fraction(2)


def test_exact_rational_objective():
    ops = frac_ops()
    # min x + y over x >= 1/3, y >= 1/7 hits the exact rational corner
    res = solve_lp(
        [Fraction(1), Fraction(1)],
        [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]],
        [Fraction(1, 3), Fraction(1, 7)],
        ops,
    )
    assert res.status == "optimal"
    assert res.objective == Fraction(1, 3) + Fraction(1, 7)
