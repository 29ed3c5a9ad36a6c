"""Dense two-phase simplex over an arbitrary ordered field.

The same implementation serves two rather different callers:

* the code-bound pipeline, which needs *exact* LP solves over Q(sqrt2)
  with a Farkas certificate on infeasibility, and
* the sum-of-squares pipeline, which solves small dense LPs in
  high-precision floating point (sign tests with a tolerance).

All problem variables are free; constraints are of the form A x >= b.
Internally variables are split into positive parts and slack/artificial
columns are appended.  Pivoting uses Dantzig's rule with a fallback to
Bland's rule once the objective stalls, which rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

__all__ = ["FieldOps", "LPResult", "solve_lp", "verify_farkas"]


@dataclass(frozen=True)
class FieldOps:
    """Scalar operations the simplex needs beyond + - * /."""

    zero: object
    one: object
    sign: Callable[[object], int]  # -1 / 0 / +1, exact or tolerance-based

    def is_pos(self, x) -> bool:
        return self.sign(x) > 0

    def is_neg(self, x) -> bool:
        return self.sign(x) < 0

    def is_zero(self, x) -> bool:
        return self.sign(x) == 0


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[List] = None  # values of the free variables
    objective: Optional[object] = None
    farkas: Optional[List] = None  # w >= 0 with w^T A = 0, w^T b > 0
    ray: Optional[List] = None  # improving direction on unboundedness
    iterations: int = 0


class _Tableau:
    def __init__(self, rows, rhs, ncols, ops: FieldOps):
        self.rows = rows  # list of lists, one per constraint
        self.rhs = rhs
        self.ncols = ncols
        self.ops = ops
        self.basis: List[int] = [-1] * len(rows)

    def pivot(self, r: int, c: int):
        ops = self.ops
        piv = self.rows[r][c]
        inv = ops.one / piv
        self.rows[r] = [v * inv for v in self.rows[r]]
        self.rhs[r] = self.rhs[r] * inv
        prow = self.rows[r]
        prhs = self.rhs[r]
        for i in range(len(self.rows)):
            if i == r:
                continue
            f = self.rows[i][c]
            if ops.is_zero(f):
                continue
            row = self.rows[i]
            self.rows[i] = [v - f * p for v, p in zip(row, prow)]
            self.rhs[i] = self.rhs[i] - f * prhs
        self.basis[r] = c


def _reduced_costs(tab: _Tableau, cost: Sequence) -> tuple:
    """Return (reduced cost row, objective value) for the current basis."""
    ops = tab.ops
    red = list(cost)
    val = ops.zero
    for i, bcol in enumerate(tab.basis):
        cb = cost[bcol]
        if ops.is_zero(cb):
            continue
        row = tab.rows[i]
        red = [rj - cb * aj for rj, aj in zip(red, row)]
        val = val + cb * tab.rhs[i]
    return red, val


def _iterate(tab: _Tableau, cost, allowed, max_iter=200000):
    """Run simplex minimization; returns (status, red, objval, iterations)."""
    ops = tab.ops
    red, objval = _reduced_costs(tab, cost)
    m = len(tab.rows)
    stall = 0
    it = 0
    while True:
        it += 1
        if it > max_iter:
            raise RuntimeError("simplex iteration limit exceeded")
        use_bland = stall > 2 * m + 10
        enter = -1
        best = ops.zero
        for j in range(tab.ncols):
            if not allowed[j]:
                continue
            if ops.is_neg(red[j]):
                if use_bland:
                    enter = j
                    break
                if enter < 0 or ops.is_neg(red[j] - best):
                    enter = j
                    best = red[j]
        if enter < 0:
            return "optimal", red, objval, it
        # ratio test
        leave = -1
        ratio = None
        for i in range(m):
            a = tab.rows[i][enter]
            if ops.is_pos(a):
                r = tab.rhs[i] / a
                if leave < 0:
                    leave, ratio = i, r
                else:
                    d = ops.sign(r - ratio)
                    if d < 0 or (d == 0 and tab.basis[i] < tab.basis[leave]):
                        leave, ratio = i, r
        if leave < 0:
            return "unbounded_" + str(enter), red, objval, it
        degenerate = ops.is_zero(tab.rhs[leave])
        rc = red[enter]
        tab.pivot(leave, enter)
        # update the reduced-cost row by the same pivot
        prow = tab.rows[leave]
        red = [rj - rc * pj for rj, pj in zip(red, prow)]
        red[enter] = ops.zero
        objval = objval + rc * tab.rhs[leave]
        stall = stall + 1 if degenerate else 0


def solve_lp(c: Sequence, A: Sequence[Sequence], b: Sequence, ops: FieldOps,
             maximize: bool = False) -> LPResult:
    """Solve max/min c^T x subject to A x >= b with all variables free."""
    m = len(A)
    n = len(c)
    zero, one = ops.zero, ops.one
    # column layout: u (n) | v (n) | slacks (m) | artificials (appended)
    ncols = 2 * n + m
    rows = []
    rhs = []
    sigma = []  # row sign applied to reach b_std >= 0
    art_of_row = {}
    for i in range(m):
        s = -1 if ops.is_neg(b[i]) or ops.is_zero(b[i]) else 1
        sigma.append(s)
        row = [zero] * ncols
        for k in range(n):
            a = A[i][k]
            v = a if s == 1 else -a
            row[k] = v
            row[n + k] = -v
        row[2 * n + i] = one * (-s)  # slack enters as A x - s_i = b
        rows.append(row)
        rhs.append(b[i] if s == 1 else -b[i])
    tab = _Tableau(rows, rhs, ncols, ops)
    narts = 0
    art_cols = []
    for i in range(m):
        if sigma[i] == -1:
            tab.basis[i] = 2 * n + i  # slack column has coefficient +1
        else:
            col = ncols + narts
            art_of_row[i] = col
            art_cols.append((i, col))
            narts += 1
    if narts:
        for row in tab.rows:
            row.extend([zero] * narts)
        for i, col in art_cols:
            tab.rows[i][col] = one
            tab.basis[i] = col
        tab.ncols = ncols + narts

    total_cols = tab.ncols
    iterations = 0

    if narts:
        cost1 = [zero] * total_cols
        for _, col in art_cols:
            cost1[col] = one
        allowed = [True] * total_cols
        status, red, objval, it = _iterate(tab, cost1, allowed)
        iterations += it
        if status != "optimal":  # phase 1 is always bounded below by 0
            raise RuntimeError("phase 1 terminated abnormally: " + status)
        if ops.is_pos(objval):
            # The slack column of row i carries -sigma_i * e_i, so its
            # phase-1 reduced cost equals sigma_i * y_i, which is exactly
            # the multiplier w_i >= 0 on the original row A_i x >= b_i.
            w = [red[2 * n + i] for i in range(m)]
            return LPResult(status="infeasible", farkas=w, iterations=iterations)
        # drive leftover basic artificials out of the basis
        for i in range(m):
            if tab.basis[i] >= ncols:
                piv = -1
                for j in range(ncols):
                    if not ops.is_zero(tab.rows[i][j]):
                        piv = j
                        break
                if piv >= 0:
                    tab.pivot(i, piv)
                # else: redundant row; keep the artificial at value 0

    cost2 = [zero] * total_cols
    for k in range(n):
        ck = c[k]
        if maximize:
            ck = zero - ck
        cost2[k] = ck
        cost2[n + k] = zero - ck
    allowed = [True] * total_cols
    for j in range(ncols, total_cols):
        allowed[j] = False
    status, red, objval, it = _iterate(tab, cost2, allowed)
    iterations += it

    def _x_values():
        xs = [zero] * total_cols
        for i, bcol in enumerate(tab.basis):
            xs[bcol] = tab.rhs[i]
        return [xs[k] - xs[n + k] for k in range(n)]

    if status.startswith("unbounded_"):
        enter = int(status.split("_")[1])
        d = [zero] * total_cols
        d[enter] = one
        for i, bcol in enumerate(tab.basis):
            d[bcol] = zero - tab.rows[i][enter]
        ray = [d[k] - d[n + k] for k in range(n)]
        return LPResult(status="unbounded", x=_x_values(), ray=ray,
                        iterations=iterations)

    x = _x_values()
    obj = zero
    for ck, xk in zip(c, x):
        obj = obj + ck * xk
    return LPResult(status="optimal", x=x, objective=obj, iterations=iterations)


def verify_farkas(A: Sequence[Sequence], b: Sequence, w: Sequence,
                  ops: FieldOps) -> bool:
    """Check that w certifies infeasibility of {A x >= b}.

    Requires w >= 0 componentwise, w^T A = 0 and w^T b > 0, all checked
    with the field's own sign function (exact for exact fields).
    """
    if any(ops.is_neg(wi) for wi in w):
        return False
    n = len(A[0]) if A else 0
    for k in range(n):
        s = ops.zero
        for wi, row in zip(w, A):
            s = s + wi * row[k]
        if not ops.is_zero(s):
            return False
    t = ops.zero
    for wi, bi in zip(w, b):
        t = t + wi * bi
    return ops.is_pos(t)
