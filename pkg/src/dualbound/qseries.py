"""Exact truncated q-expansions of the modular objects in the pipeline.

Series live on a grid q^(1/d): a PuiseuxSeries with denominator d,
offset e0 and trunc kept terms represents

    sum_{m=0}^{trunc-1} coeffs[m] * q^((e0 + m)/d),

with all coefficients exact rationals.  Truncation orders are tracked
conservatively through arithmetic: the recorded trunc always is an
order to which the result is guaranteed correct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional

from .exactfield import Rat, rat

__all__ = [
    "PuiseuxSeries",
    "VirasoroDecomposition",
    "eta_series",
    "lambda_series",
    "series_reversion",
    "j_from_lambda",
    "j_cube_root",
    "virasoro_char",
    "virasoro_decompose",
]

DEFAULT_TRUNC = 64

_ZERO = rat(0)
_ONE = rat(1)


class PuiseuxSeries:
    __slots__ = ("denom", "offset", "coeffs", "trunc")

    def __init__(self, denom: int, offset: int, coeffs, trunc: Optional[int] = None):
        coeffs = [rat(c) for c in coeffs]
        if trunc is None:
            trunc = len(coeffs)
        if len(coeffs) < trunc:
            coeffs = coeffs + [_ZERO] * (trunc - len(coeffs))
        elif len(coeffs) > trunc:
            coeffs = coeffs[:trunc]
        self.denom = denom
        self.offset = offset
        self.coeffs = coeffs
        self.trunc = trunc

    # -- bookkeeping -------------------------------------------------

    @property
    def bound(self) -> int:
        """First grid index (offset units) beyond the guaranteed order."""
        return self.offset + self.trunc

    def lead_index(self) -> Optional[int]:
        """Grid index of the first nonzero coefficient, None if zero."""
        for m, c in enumerate(self.coeffs):
            if c != 0:
                return self.offset + m
        return None

    def trimmed(self) -> "PuiseuxSeries":
        """Strip leading zeros (same guaranteed order)."""
        lead = self.lead_index()
        if lead is None or lead == self.offset:
            return self
        drop = lead - self.offset
        return PuiseuxSeries(self.denom, lead, self.coeffs[drop:], self.trunc - drop)

    def coeff(self, exponent) -> Rat:
        """Coefficient of q^exponent; raises if beyond the known order."""
        e = rat(exponent) * self.denom
        if e.denominator != 1:
            return _ZERO
        idx = int(e) - self.offset
        if idx >= self.trunc:
            raise ValueError(f"exponent {exponent} beyond truncation order")
        if idx < 0:
            return _ZERO
        return self.coeffs[idx]

    def rebase(self, denom: int) -> "PuiseuxSeries":
        """Re-express on a finer grid whose denominator is a multiple."""
        if denom == self.denom:
            return self
        if denom % self.denom:
            raise ValueError("new denominator must be a multiple of the old")
        f = denom // self.denom
        coeffs = [_ZERO] * (self.trunc * f)
        for m, c in enumerate(self.coeffs):
            coeffs[m * f] = c
        return PuiseuxSeries(denom, self.offset * f, coeffs)

    def coarsen(self) -> "PuiseuxSeries":
        """Drop to the coarsest grid on which all exponents live."""
        step = 0
        for m, c in enumerate(self.coeffs):
            if c != 0:
                step = math.gcd(step, self.offset + m)
        step = math.gcd(step, self.denom)
        if step <= 1:
            return self
        d = self.denom // step
        off, rem = divmod(self.offset, step)
        if rem:
            off += 1  # first representable index at or above the old offset
        coeffs = []
        idx = off * step
        while idx < self.bound:
            coeffs.append(self.coeffs[idx - self.offset] if idx >= self.offset else _ZERO)
            idx += step
        return PuiseuxSeries(d, off, coeffs)

    def __repr__(self):
        head = []
        for m, c in enumerate(self.coeffs):
            if c != 0:
                head.append(f"{c}*q^({self.offset + m}/{self.denom})")
            if len(head) >= 4:
                break
        body = " + ".join(head) if head else "0"
        return f"<PuiseuxSeries {body} + O(q^({self.bound}/{self.denom}))>"

    def equal_to_order(self, other: "PuiseuxSeries") -> bool:
        """Equality up to the common guaranteed order."""
        d = math.lcm(self.denom, other.denom)
        a, b = self.rebase(d), other.rebase(d)
        hi = min(a.bound, b.bound)
        lo = min(a.offset, b.offset)
        for idx in range(lo, hi):
            ca = a.coeffs[idx - a.offset] if idx >= a.offset else _ZERO
            cb = b.coeffs[idx - b.offset] if idx >= b.offset else _ZERO
            if ca != cb:
                return False
        return True

    def is_zero_to_order(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def to_json_terms(self) -> List[List[int]]:
        """[[exp_num, exp_den, coeff_num, coeff_den], ...] for nonzero terms."""
        out = []
        for m, c in enumerate(self.coeffs):
            if c != 0:
                e = rat(self.offset + m, self.denom)
                out.append([int(e.numerator), int(e.denominator),
                            int(c.numerator), int(c.denominator)])
        return out

    # -- arithmetic --------------------------------------------------

    def _common(self, other):
        d = math.lcm(self.denom, other.denom)
        return self.rebase(d), other.rebase(d)

    def __add__(self, other):
        if isinstance(other, (int, Rat)):
            other = PuiseuxSeries(self.denom, 0, [rat(other)], self.trunc)
        a, b = self._common(other)
        off = min(a.offset, b.offset)
        hi = min(a.bound, b.bound)
        coeffs = [_ZERO] * (hi - off)
        for src in (a, b):
            for m, c in enumerate(src.coeffs):
                idx = src.offset + m - off
                if 0 <= idx < len(coeffs):
                    coeffs[idx] = coeffs[idx] + c
        return PuiseuxSeries(a.denom, off, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(self.denom, self.offset, [-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Rat)):
            other = PuiseuxSeries(self.denom, 0, [rat(other)], self.trunc)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        factor = rat(factor)
        return PuiseuxSeries(self.denom, self.offset, [factor * c for c in self.coeffs])

    def shift(self, exponent) -> "PuiseuxSeries":
        """Multiply by q^exponent (a rational on a compatible grid)."""
        e = rat(exponent)
        d = math.lcm(self.denom, int(e.denominator))
        s = self.rebase(d)
        return PuiseuxSeries(d, s.offset + int(e * d), s.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, Rat)):
            return self.scale(other)
        a, b = self._common(other)
        a, b = a.trimmed(), b.trimmed()
        # guaranteed order: each factor's truncation tail enters at
        # (its bound) + (other's leading offset)
        hi = min(a.bound + b.offset, b.bound + a.offset)
        off = a.offset + b.offset
        coeffs = [_ZERO] * max(hi - off, 0)
        for i, ca in enumerate(a.coeffs):
            if ca == 0:
                continue
            jmax = min(len(b.coeffs), len(coeffs) - i)
            for j in range(jmax):
                cb = b.coeffs[j]
                if cb != 0:
                    coeffs[i + j] = coeffs[i + j] + ca * cb
        return PuiseuxSeries(a.denom, off, coeffs)

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxSeries":
        """Multiplicative inverse; the leading coefficient must be nonzero."""
        s = self.trimmed()
        if s.lead_index() != s.offset or not s.coeffs or s.coeffs[0] == 0:
            raise ZeroDivisionError("series has no invertible leading term")
        c0 = s.coeffs[0]
        n = s.trunc
        inv = [_ZERO] * n
        inv[0] = _ONE / c0
        for m in range(1, n):
            acc = _ZERO
            for i in range(1, m + 1):
                if i < len(s.coeffs) and s.coeffs[i] != 0:
                    acc = acc + s.coeffs[i] * inv[m - i]
            inv[m] = -acc / c0
        return PuiseuxSeries(s.denom, -s.offset, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Rat)):
            return self.scale(_ONE / rat(other))
        return self * other.inverse()

    def pow_int(self, n: int) -> "PuiseuxSeries":
        if n < 0:
            return self.inverse().pow_int(-n)
        d = self.denom
        result = PuiseuxSeries(d, 0, [_ONE], self.trunc)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    __pow__ = pow_int

    def pow_rat(self, r) -> "PuiseuxSeries":
        """Formal r-th power for rational r; leading coefficient must be 1.

        The leading exponent times r must land on a (possibly finer) grid;
        the result uses the real branch with leading coefficient 1.
        """
        r = rat(r)
        s = self.trimmed()
        if s.coeffs[0] != 1:
            raise ValueError("pow_rat requires leading coefficient 1")
        lead_exp = rat(s.offset, s.denom) * r
        # u = s / q^lead with constant term 1
        u_coeffs = s.coeffs
        n = s.trunc
        # binomial series (1+w)^r where w = u - 1
        out = [_ZERO] * n
        out[0] = _ONE
        term = [_ZERO] * n
        term[0] = _ONE  # current w^k, built incrementally
        w = [_ZERO] + [c for c in u_coeffs[1:]]
        binom = _ONE
        for k in range(1, n):
            binom = binom * (r - (k - 1)) / k
            new = [_ZERO] * n
            for i, a in enumerate(term):
                if a == 0:
                    continue
                for j in range(1, n - i):
                    if w[j] != 0:
                        new[i + j] = new[i + j] + a * w[j]
            term = new
            if all(t == 0 for t in term):
                break
            for i, t in enumerate(term):
                if t != 0:
                    out[i] = out[i] + binom * t
        d = math.lcm(s.denom, int(lead_exp.denominator))
        res = PuiseuxSeries(s.denom, 0, out).rebase(d)
        return PuiseuxSeries(d, res.offset + int(lead_exp * d), res.coeffs)


@dataclass
class VirasoroDecomposition:
    c: Rat
    coefficients: Dict[Rat, Rat]  # h -> c_h, including h = 0 for the vacuum
    remainder_order: Rat  # exact up to (excluding) this q-exponent

    @property
    def c0(self) -> Rat:
        return self.coefficients.get(_ZERO, _ZERO)


def eta_series(trunc: int = DEFAULT_TRUNC * 24) -> PuiseuxSeries:
    """Dedekind eta q^(1/24) prod (1 - q^n) via the pentagonal number theorem.

    ``trunc`` counts grid terms on the 1/24 grid; the q-order reached is
    trunc/24.
    """
    if trunc < 1:
        raise ValueError("trunc must be >= 1")
    qorder = (trunc + 23) // 24
    coeffs = [_ZERO] * trunc
    k = 0
    while True:
        done = True
        for kk in (k, -k) if k else (0,):
            e = kk * (3 * kk - 1) // 2
            if e <= qorder:
                idx = 24 * e
                if idx < trunc:
                    coeffs[idx] = coeffs[idx] + (_ONE if kk % 2 == 0 else -_ONE)
                done = False
        if k and done:
            break
        k += 1
    return PuiseuxSeries(24, 1, coeffs)


def _product_one_minus_qn(order: int) -> PuiseuxSeries:
    """prod_{n>=1} (1 - q^n) to q-order ``order`` (integer grid)."""
    coeffs = [_ZERO] * (order + 1)
    coeffs[0] = _ONE
    k = 1
    while True:
        hit = False
        for kk in (k, -k):
            e = kk * (3 * kk - 1) // 2
            if 0 < e <= order:
                coeffs[e] = coeffs[e] + (_ONE if kk % 2 == 0 else -_ONE)
                hit = True
        if not hit:
            break
        k += 1
    return PuiseuxSeries(1, 0, coeffs)


def lambda_series(trunc: int = DEFAULT_TRUNC) -> PuiseuxSeries:
    """The modular lambda function as a series in q^(1/2).

    Computed from the theta-quotient product
    16 q^(1/2) prod ((1 + q^n)/(1 + q^(n-1/2)))^8.
    ``trunc`` counts terms on the half-integer grid.
    """
    if trunc < 1:
        raise ValueError("trunc must be >= 1")
    order2 = trunc  # exponents counted in halves
    num = PuiseuxSeries(2, 0, [_ONE], order2)
    den = PuiseuxSeries(2, 0, [_ONE], order2)
    n = 1
    while 2 * n - 1 < order2:
        if 2 * n < order2:
            fac = [_ZERO] * order2
            fac[0] = _ONE
            fac[2 * n] = _ONE
            num = num * PuiseuxSeries(2, 0, fac, order2)
        fac = [_ZERO] * order2
        fac[0] = _ONE
        fac[2 * n - 1] = _ONE
        den = den * PuiseuxSeries(2, 0, fac, order2)
        n += 1
    quot = (num * den.inverse()).pow_int(8)
    return quot.shift(rat(1, 2)).scale(16)


def series_reversion(s: PuiseuxSeries) -> PuiseuxSeries:
    """Compositional inverse in the uniformizer p = q^(1/denom).

    Requires a simple zero: the leading exponent must equal the grid
    step.  Returns t with s(t(z)) = z + O(z^trunc); the result's grid
    denominator is 1 (a plain power series in the new variable z).
    """
    s = s.trimmed()
    if s.lead_index() != 1:
        raise ValueError("series must have a simple zero in its uniformizer")
    n = s.trunc + 1  # orders in z we can guarantee
    a = [_ZERO] * n
    for m, c in enumerate(s.coeffs):
        if 1 + m < n:
            a[1 + m] = c
    b = [_ZERO] * n
    b[1] = _ONE / a[1]
    for k in range(2, n):
        # coefficient of z^k in s(t(z)) with t known to order k-1 and
        # the unknown b_k entering linearly through a_1
        t = PuiseuxSeries(1, 0, b[:k], k + 1)
        comp = PuiseuxSeries(1, 0, [_ZERO], k + 1)
        tp = PuiseuxSeries(1, 0, [_ONE], k + 1)
        for j in range(1, k + 1):
            tp = tp * t
            if a[j] != 0:
                comp = comp + tp.scale(a[j])
        e = comp.coeffs[k - comp.offset] if comp.offset <= k < comp.bound else _ZERO
        b[k] = -e / a[1]
    return PuiseuxSeries(1, 1, b[1:], n - 1)


def j_from_lambda(trunc: int = DEFAULT_TRUNC) -> PuiseuxSeries:
    """The modular j-function via j = 256 (1 - L + L^2)^3 / (L^2 (1 - L)^2)."""
    if trunc < 3:
        raise ValueError("trunc must be >= 3")
    lam = lambda_series(2 * trunc + 8)
    one = PuiseuxSeries(2, 0, [_ONE], lam.trunc)
    num = (one - lam + lam * lam).pow_int(3).scale(256)
    den = (lam * lam) * (one - lam).pow_int(2)
    j = num * den.inverse()
    for m, c in enumerate(j.coeffs):
        if (j.offset + m) % 2 and c != 0:
            raise ArithmeticError("j-series acquired a half-integer term")
    return j.coarsen()


def j_cube_root(trunc: int = DEFAULT_TRUNC) -> PuiseuxSeries:
    """Formal cube root of j, real branch q^(-1/3)(1 + ...)."""
    if trunc < 2:
        raise ValueError("trunc must be >= 2")
    return j_from_lambda(trunc).pow_rat(rat(1, 3))


def virasoro_char(c, h, vacuum: bool = False,
                  trunc: int = DEFAULT_TRUNC) -> PuiseuxSeries:
    """Virasoro highest-weight character q^(-c/24+h) / prod (1 - q^n).

    ``vacuum`` multiplies by (1 - q), giving the character of the
    vacuum module (h must then be 0).
    """
    if trunc < 1:
        raise ValueError("trunc must be >= 1")
    c, h = rat(c), rat(h)
    if vacuum and h != 0:
        raise ValueError("the vacuum character requires h = 0")
    lead = -c / 24 + h
    order = trunc
    parts = _product_one_minus_qn(order).inverse()
    if vacuum:
        parts = parts * PuiseuxSeries(1, 0, [_ONE, -_ONE], order + 1)
    return parts.shift(lead)


def virasoro_decompose(f: PuiseuxSeries, c,
                       require_nonneg: bool = False) -> VirasoroDecomposition:
    """Peel f into c_0 vacuum character + sum over h of c_h characters.

    f's leading exponent must be -c/24; the h run over the exponent grid
    of f.  Greedy from the lowest surviving exponent; exact up to f's
    guaranteed order.
    """
    c = rat(c)
    f = f.trimmed()
    lead = rat(f.offset, f.denom)
    if lead != -c / 24:
        raise ValueError(f"leading exponent {lead} does not match -c/24")
    bound_exp = rat(f.bound, f.denom)
    order = f.bound - f.offset  # grid terms we can resolve
    coefficients: Dict[Rat, Rat] = {}
    rem = f
    c0 = rem.coeffs[0]
    chi_trunc = order + 2
    rem = rem - virasoro_char(c, 0, vacuum=True, trunc=chi_trunc).scale(c0)
    coefficients[_ZERO] = c0
    while True:
        rem = rem.trimmed()
        lead_idx = rem.lead_index()
        if lead_idx is None or rat(lead_idx, rem.denom) >= bound_exp:
            break
        h = rat(lead_idx, rem.denom) + c / 24
        ch = rem.coeffs[lead_idx - rem.offset]
        if require_nonneg and ch < 0:
            raise ArithmeticError(f"negative coefficient {ch} at h = {h}")
        coefficients[h] = ch
        rem = rem - virasoro_char(c, h, trunc=chi_trunc).scale(ch)
    return VirasoroDecomposition(c=c, coefficients=coefficients,
                                 remainder_order=bound_exp)
