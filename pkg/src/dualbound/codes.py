"""Linear programming bounds for the dual packing problem of binary codes.

Weight enumerators, the MacWilliams transform, the basis
A^(n-2j) B^j of the substitution-invariant ring with
A = (sqrt2 - 1) x + y and B = x^2 + y^2, and the exact LP feasibility
scan producing the bound mu(n).  Everything is exact over Q(sqrt2);
infeasibility always comes with a Farkas certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .exactfield import HomoPoly2, QSqrt2, Rat, rat
from .simplex import FieldOps, LPResult, solve_lp, verify_farkas

__all__ = [
    "WeightEnumerator",
    "LPProblem",
    "LPOutcome",
    "macwilliams",
    "invariant_basis",
    "s_invariance_check",
    "code_lp",
    "code_bound",
]

QS_OPS = FieldOps(zero=QSqrt2(0, 0), one=QSqrt2(1, 0), sign=lambda x: x.sign())

_INV_SQRT2 = QSqrt2(0, rat(1, 2))  # 1/sqrt2 = sqrt2/2


@dataclass(frozen=True)
class WeightEnumerator:
    """W_C as a coefficient vector: coeffs[i] = #codewords of weight i."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.n + 1:
            raise ValueError("need n+1 coefficients")
        object.__setattr__(self, "coeffs", tuple(rat(c) for c in self.coeffs))

    @staticmethod
    def from_codewords(n: int, words) -> "WeightEnumerator":
        counts = [0] * (n + 1)
        for w in words:
            counts[sum(w)] += 1
        return WeightEnumerator(n, tuple(counts))

    def to_homopoly(self) -> HomoPoly2:
        return HomoPoly2(self.n, [QSqrt2(c, 0) for c in self.coeffs])


def _sqrt_of_power_of_two(r) -> QSqrt2:
    """Exact sqrt of a rational 2^k, valid in Q(sqrt2) for any integer k."""
    r = rat(r)
    num, den = int(r.numerator), int(r.denominator)
    k = 0
    while num % 2 == 0:
        num //= 2
        k += 1
    while den % 2 == 0:
        den //= 2
        k -= 1
    if num != 1 or den != 1:
        raise ValueError(f"dual_index {r} is not a power of two")
    half, odd = divmod(k, 2)
    base = rat(2) ** half if half >= 0 else rat(1, 2 ** (-half))
    if odd == 0:
        return QSqrt2(base, 0)
    return QSqrt2(0, base)  # sqrt(2) * 2^half


def _substitute_s(p: HomoPoly2) -> HomoPoly2:
    """Apply x -> (y - x)/sqrt2, y -> (x + y)/sqrt2 to a homogeneous poly."""
    n = p.degree
    px = HomoPoly2(1, [_INV_SQRT2, -_INV_SQRT2])  # (y - x)/sqrt2
    py = HomoPoly2(1, [_INV_SQRT2, _INV_SQRT2])  # (x + y)/sqrt2
    # powers up front so the substitution stays O(n^2) polynomial products
    px_pows = [HomoPoly2(0, [QSqrt2(1, 0)])]
    py_pows = [HomoPoly2(0, [QSqrt2(1, 0)])]
    for _ in range(n):
        px_pows.append(px_pows[-1] * px)
        py_pows.append(py_pows[-1] * py)
    out = HomoPoly2(n, [QSqrt2(0, 0)] * (n + 1))
    for i, ci in enumerate(p.coeffs):
        if ci.is_zero():
            continue
        out = out + (px_pows[i] * py_pows[n - i]).scale(ci)
    return out


def macwilliams(w: WeightEnumerator, dual_index) -> WeightEnumerator:
    """MacWilliams transform: sqrt(|Cperp/C|) * W_C((y-x)/sqrt2, (x+y)/sqrt2).

    ``dual_index`` must be a power of two so the scale factor stays in
    Q(sqrt2).  Raises ValueError if any output coefficient fails to be
    rational, which signals an invalid input enumerator.
    """
    scale = _sqrt_of_power_of_two(dual_index)
    transformed = _substitute_s(w.to_homopoly()).scale(scale)
    coeffs = []
    for c in transformed.coeffs:
        if c.b != 0:
            raise ValueError("MacWilliams transform left the rationals; bad enumerator")
        coeffs.append(c.a)
    return WeightEnumerator(w.n, tuple(coeffs))


def invariant_basis(n: int) -> List[HomoPoly2]:
    """[A^(n-2j) B^j for j = 0..n//2], each homogeneous of degree n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = HomoPoly2(1, [QSqrt2(1, 0), QSqrt2(-1, 1)])  # (sqrt2-1) x + y
    b = HomoPoly2(2, [QSqrt2(1, 0), QSqrt2(0, 0), QSqrt2(1, 0)])  # x^2 + y^2
    basis = []
    for j in range(n // 2 + 1):
        basis.append(a ** (n - 2 * j) * b ** j)
    return basis


def s_invariance_check(p: HomoPoly2) -> bool:
    """True iff p is exactly invariant under the MacWilliams substitution."""
    return _substitute_s(p) == p


@dataclass
class LPProblem:
    """Constraint data of the bound LP for length n, exclusion threshold k.

    matrix[i][j] is the coefficient of x^i y^(n-i) in A^(n-2j) B^j, so the
    monomial coefficients of F = sum_j b_j A^(n-2j) B^j are
    c_i = sum_j matrix[i][j] b_j.
    """

    n: int
    k: int
    matrix: List[List[QSqrt2]]

    @staticmethod
    def build(n: int, k: int) -> "LPProblem":
        if not 1 <= k <= n:
            raise ValueError("need 1 <= k <= n")
        basis = invariant_basis(n)
        matrix = [[basis[j].coeffs[i] for j in range(len(basis))] for i in range(n + 1)]
        return LPProblem(n, k, matrix)

    def constraint_rows(self):
        """Rows (A_ge, b_ge) of the system in >= form over the b_j.

        c_0 = 1 and c_i = 0 (i <= k) are encoded as constraint pairs so a
        Farkas vector is a plain nonnegative combination of rows.
        """
        zero, one = QS_OPS.zero, QS_OPS.one
        rows, rhs = [], []
        for i in range(self.n + 1):
            row = self.matrix[i]
            if i == 0:
                rows.append(list(row)); rhs.append(one)
                rows.append([zero - v for v in row]); rhs.append(zero - one)
            elif i <= self.k:
                rows.append(list(row)); rhs.append(zero)
                rows.append([zero - v for v in row]); rhs.append(zero)
            else:
                rows.append(list(row)); rhs.append(zero)
        return rows, rhs


@dataclass
class LPOutcome:
    status: str  # "feasible" | "infeasible"
    n: int
    k: int
    objective: Optional[QSqrt2] = None  # max of sum_i c_i when bounded
    unbounded: bool = False
    b_values: Optional[List[QSqrt2]] = None
    farkas: Optional[List[QSqrt2]] = None
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def verify_infeasibility(self) -> bool:
        """Re-check the Farkas certificate against a fresh constraint system."""
        if self.status != "infeasible" or self.farkas is None:
            return False
        rows, rhs = LPProblem.build(self.n, self.k).constraint_rows()
        return verify_farkas(rows, rhs, self.farkas, QS_OPS)


def _paired_certificate(n: int, k: int, lam, w):
    """Express (equality multipliers, inequality multipliers) in the
    row ordering of LPProblem.constraint_rows (equalities as +/- pairs)."""
    zero = QS_OPS.zero
    cert = []
    for i in range(k + 1):
        li = lam[i]
        if li.sign() >= 0:
            cert.extend([li, zero])
        else:
            cert.extend([zero, zero - li])
    cert.extend(w)
    return cert


def code_lp(n: int, k: int) -> LPOutcome:
    """Exact simplex solve of the section-2 LP for length n, threshold k.

    Maximizes sum_i c_i subject to c_0 = 1, c_i = 0 for i <= k and
    c_i >= 0 for i > k, over the free variables b_j.  Unbounded problems
    count as feasible (the bound scan only needs infeasible vs not).

    The k+1 equality constraints are eliminated exactly by Gauss-Jordan
    before the simplex runs; multipliers are tracked so infeasibility
    still yields a Farkas certificate for the original system.
    """
    problem = LPProblem.build(n, k)
    zero, one = QS_OPS.zero, QS_OPS.one
    nb = len(problem.matrix[0])
    # equality block [E | e | M] with M tracking row operations
    eq = []
    for i in range(k + 1):
        rhs = one if i == 0 else zero
        mult = [one if j == i else zero for j in range(k + 1)]
        eq.append([list(problem.matrix[i]), rhs, mult])
    pivots = []  # (row index in eq, pivot column)
    used_cols = set()
    for r in range(len(eq)):
        row, rhs, mult = eq[r]
        pc = next((j for j in range(nb) if j not in used_cols and row[j].sign() != 0), None)
        if pc is None:
            if rhs.sign() != 0:
                # 0 = nonzero: the tracked multipliers certify infeasibility
                lam = mult if rhs.sign() > 0 else [zero - v for v in mult]
                cert = _paired_certificate(n, k, lam, [zero] * (n - k))
                return LPOutcome("infeasible", n, k, farkas=cert)
            continue
        inv = one / row[pc]
        row[:] = [v * inv for v in row]
        rhs = rhs * inv
        mult[:] = [v * inv for v in mult]
        eq[r][1] = rhs
        for r2 in range(len(eq)):
            if r2 == r:
                continue
            f = eq[r2][0][pc]
            if f.sign() == 0:
                continue
            eq[r2][0] = [v - f * p for v, p in zip(eq[r2][0], row)]
            eq[r2][1] = eq[r2][1] - f * rhs
            eq[r2][2] = [v - f * p for v, p in zip(eq[r2][2], mult)]
        pivots.append((r, pc))
        used_cols.add(pc)
    free_cols = [j for j in range(nb) if j not in used_cols]

    def _reduce(row, rhs, track=False):
        """Eliminate pivot columns from (row . b >= rhs); returns the
        restriction to the free columns, plus tracked multipliers."""
        row = list(row)
        mult = [zero] * (k + 1) if track else None
        for r, pc in pivots:
            f = row[pc]
            if f.sign() == 0:
                continue
            erow, erhs, emult = eq[r]
            row = [v - f * p for v, p in zip(row, erow)]
            rhs = rhs - f * erhs
            if track:
                mult = [v - f * p for v, p in zip(mult, emult)]
        return [row[j] for j in free_cols], rhs, mult

    ineq_rows, ineq_rhs, ineq_mult = [], [], []
    for i in range(k + 1, n + 1):
        row, rhs, mult = _reduce(problem.matrix[i], zero, track=True)
        ineq_rows.append(row)
        ineq_rhs.append(rhs)
        ineq_mult.append(mult)
    objective = [zero] * nb
    for i in range(n + 1):
        for j, v in enumerate(problem.matrix[i]):
            objective[j] = objective[j] + v
    obj_row, neg_const, _ = _reduce(objective, zero)
    obj_const = zero - neg_const  # obj . b = obj_row . b_F + obj_const

    res = solve_lp(obj_row, ineq_rows, ineq_rhs, QS_OPS, maximize=True)
    iterations = res.iterations
    if res.status == "infeasible":
        lam = [zero] * (k + 1)
        for wi, mult in zip(res.farkas, ineq_mult):
            if wi.sign() != 0:
                lam = [l + wi * m for l, m in zip(lam, mult)]
        cert = _paired_certificate(n, k, lam, res.farkas)
        return LPOutcome("infeasible", n, k, farkas=cert, iterations=iterations)

    def _full_b(b_free):
        b = [zero] * nb
        for j, v in zip(free_cols, b_free):
            b[j] = v
        for r, pc in pivots:
            erow, erhs, _ = eq[r]
            acc = erhs
            for j in free_cols:
                acc = acc - erow[j] * b[j]
            b[pc] = acc
        return b

    if res.status == "unbounded":
        return LPOutcome("feasible", n, k, unbounded=True,
                         b_values=_full_b(res.x), iterations=iterations)
    return LPOutcome("feasible", n, k, objective=res.objective + obj_const,
                     b_values=_full_b(res.x), iterations=iterations)


def code_bound(n: int, return_outcomes: bool = False):
    """Least k for which the LP is infeasible (the mu row of the bound table)."""
    outcomes = []
    for k in range(1, n + 1):
        out = code_lp(n, k)
        outcomes.append(out)
        if not out.feasible:
            return (k, outcomes) if return_outcomes else k
    raise RuntimeError(f"no infeasible threshold found up to k = n = {n}")


def bound_record(n: int) -> Dict:
    """Per-n JSON record for the CLI: bound, per-k status, last objective."""
    mu, outcomes = code_bound(n, return_outcomes=True)
    status_per_k = {str(o.k): o.status for o in outcomes}
    obj = None
    if len(outcomes) >= 2:
        prev = outcomes[-2]
        if prev.objective is not None:
            obj = {"a": str(prev.objective.a), "b_sqrt2": str(prev.objective.b)}
        elif prev.unbounded:
            obj = "unbounded"
    certified = outcomes[-1].verify_infeasibility()
    return {
        "n": n,
        "mu": mu,
        "status_per_k": status_per_k,
        "objective_at_k_minus_1": obj,
        "farkas_verified": certified,
    }
