"""Contour verification of the magic-function positivity argument.

For central charge c in {8, 24} there is an explicit rational function
A_c together with its companion B_c(z) = -(1-z)^(c/8-2) A_c(z|T) (here
S: z -> 1-z and T: z -> z/(z-1)) satisfying the functional equation

    A_c(z) + A_c(z|S) - (1-z)^(c/8-2) A_c(z|T) = 0

as an exact identity of rational functions.  Pairing them with

    H_{c,h}(z) = (1/(z(1-z)))^(c/24) exp(2 pi i (-c/24 + h) lambda^{-1}(z))

defines the contour functional

    D_c[phi] = int_{1/2}^1 phi A_c dz
               + 1/2 int_{1/2}^{1/2+i inf} phi B_c dz

and, for phi = H_{c,h}|(id - S), the function f_c(h) = D_c[phi].  A
contour deformation turns f_c(h) into the manifestly sign-definite
sine integral

    f_c(h) = 2 sin^2(h pi) int_0^1 H_{c,h}(z) A_c(z) dz      (h > c/16 + 1/2)

which is nonnegative and vanishes exactly on the ladder
h = c/16 + 1/2 + n.  This module evaluates both sides numerically
(lambda^{-1} through the complex AGM) and checks the rational-function
identities exactly over Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import mpmath as mp

from .exactfield import Rat, rat, working_precision

__all__ = [
    "MagicCharge",
    "NonConvergence",
    "QuadratureConfig",
    "RationalFunction",
    "ToleranceNotMet",
    "agm",
    "contour_functional",
    "eval_H",
    "f_sine",
    "hyp2f1_half_series",
    "lambda_inv",
    "magic_charge",
    "magic_identity_check",
    "zero_ladder",
]


class NonConvergence(ArithmeticError):
    """AGM iteration failed to settle on a branch."""


class ToleranceNotMet(ArithmeticError):
    """A quadrature error estimate exceeded the requested tolerance."""


# ---------------------------------------------------------------------------
# exact polynomials and rational functions over Q (ascending coefficients)

def _ptrim(p: List[Rat]) -> List[Rat]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _padd(p, q):
    n = max(len(p), len(q))
    return _ptrim([(p[i] if i < len(p) else rat(0)) +
                   (q[i] if i < len(q) else rat(0)) for i in range(n)])


def _pmul(p, q):
    out = [rat(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _ptrim(out)


def _pscale(p, s):
    return _ptrim([s * a for a in p])


def _ppow(p, k):
    out = [rat(1)]
    for _ in range(k):
        out = _pmul(out, p)
    return out


def _pzero(p) -> bool:
    return all(a == 0 for a in p)


def _pcompose_mobius(p, abcd, deg: int):
    """p((a z + b)/(c z + d)) * (c z + d)^deg, exactly (deg >= len(p)-1)."""
    a, b, c, d = (rat(v) for v in abcd)
    num = [b, a]
    den = [d, c]
    out = [rat(0)]
    for k, pk in enumerate(p):
        term = _pscale(_pmul(_ppow(num, k), _ppow(den, deg - k)), pk)
        out = _padd(out, term)
    return out


@dataclass(frozen=True)
class RationalFunction:
    """Quotient of two polynomials over Q, ascending coefficients."""
    num: Tuple
    den: Tuple

    @staticmethod
    def make(num, den) -> "RationalFunction":
        num = _ptrim([rat(v) for v in num])
        den = _ptrim([rat(v) for v in den])
        if _pzero(den):
            raise ZeroDivisionError("zero denominator polynomial")
        return RationalFunction(tuple(num), tuple(den))

    def __add__(self, other):
        return RationalFunction.make(
            _padd(_pmul(list(self.num), list(other.den)),
                  _pmul(list(other.num), list(self.den))),
            _pmul(list(self.den), list(other.den)))

    def __sub__(self, other):
        return self + RationalFunction.make(
            _pscale(list(other.num), rat(-1)), list(other.den))

    def __mul__(self, other):
        return RationalFunction.make(
            _pmul(list(self.num), list(other.num)),
            _pmul(list(self.den), list(other.den)))

    def is_zero(self) -> bool:
        return _pzero(list(self.num))

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def mobius(self, abcd) -> "RationalFunction":
        """The substitution z -> (a z + b)/(c z + d)."""
        deg = max(len(self.num), len(self.den)) - 1
        return RationalFunction.make(
            _pcompose_mobius(list(self.num), abcd, deg),
            _pcompose_mobius(list(self.den), abcd, deg))

    def __call__(self, z):
        num = mp.fsum((mp.mpf(ck.numerator) / mp.mpf(ck.denominator)) * z ** k
                      for k, ck in enumerate(self.num))
        den = mp.fsum((mp.mpf(ck.numerator) / mp.mpf(ck.denominator)) * z ** k
                      for k, ck in enumerate(self.den))
        return num / den


# S: z -> 1 - z and T: z -> z/(z-1) as Moebius coefficient tuples
_S = (-1, 1, 0, 1)
_T = (1, 0, 1, -1)


@dataclass(frozen=True)
class MagicCharge:
    """The exact magic pair (A_c, B_c) for c = 8 or 24."""
    c: int
    A: RationalFunction
    B: RationalFunction

    # numeric evaluation uses the factored forms: the expanded
    # numerators cancel to eps^(c/8) near z = 1 where the quadrature
    # needs them against the matching growth of H, and Horner on the
    # expanded coefficients would return pure roundoff there
    def A_val(self, z):
        if self.c == 8:
            return (1 - z) * (2 * z * z + z + 2) / (z * z)
        return (1 - z) ** 3 * (2 * z * z + 3 * z + 2) / (z * z)

    def B_val(self, z):
        k = 5 if self.c == 8 else 7
        return -(k * (z - 1) * z + 2) / ((z - 1) ** 2 * z * z)


def _one_minus_z_power(e: int) -> RationalFunction:
    """(1-z)^e as an exact rational function, e any integer."""
    p = _ppow([rat(1), rat(-1)], abs(e))
    if e >= 0:
        return RationalFunction.make(p, [rat(1)])
    return RationalFunction.make([rat(1)], p)


def magic_charge(c: int) -> MagicCharge:
    if c == 8:
        # A_8 = (1-z)(2z^2+z+2)/z^2
        A = RationalFunction.make(
            _pmul([rat(1), rat(-1)], [rat(2), rat(1), rat(2)]),
            [rat(0), rat(0), rat(1)])
        # B_8 = -(5(z-1)z+2)/((z-1)^2 z^2)
        B = RationalFunction.make(
            _pscale(_padd(_pscale(_pmul([rat(-1), rat(1)], [rat(0), rat(1)]),
                                  rat(5)), [rat(2)]), rat(-1)),
            _pmul(_ppow([rat(-1), rat(1)], 2), [rat(0), rat(0), rat(1)]))
    elif c == 24:
        # A_24 = (1-z)^3 (2z^2+3z+2)/z^2
        A = RationalFunction.make(
            _pmul(_ppow([rat(1), rat(-1)], 3), [rat(2), rat(3), rat(2)]),
            [rat(0), rat(0), rat(1)])
        # B_24 = -(7(z-1)z+2)/((z-1)^2 z^2)
        B = RationalFunction.make(
            _pscale(_padd(_pscale(_pmul([rat(-1), rat(1)], [rat(0), rat(1)]),
                                  rat(7)), [rat(2)]), rat(-1)),
            _pmul(_ppow([rat(-1), rat(1)], 2), [rat(0), rat(0), rat(1)]))
    else:
        raise ValueError("magic functions exist only for c = 8 and c = 24")
    return MagicCharge(c=c, A=A, B=B)


def magic_identity_check(c: int) -> bool:
    """Exact check of the functional equation and the B_c identities.

    Verifies, as polynomial identities over Q with cleared denominators:
      (i)   A_c(z) + A_c(1-z) - (1-z)^(c/8-2) A_c(z/(z-1)) = 0,
      (ii)  the stored B_c equals -(1-z)^(c/8-2) A_c(z/(z-1)),
      (iii) B_c(1-z) = B_c(z).
    """
    try:
        mc = magic_charge(c)
    except ValueError:
        return False
    e = c // 8 - 2
    w = _one_minus_z_power(e)
    AT = mc.A.mobius(_T)
    lhs = mc.A + mc.A.mobius(_S) - (w * AT)
    if not lhs.is_zero():
        return False
    Bder = w * AT * RationalFunction.make([rat(-1)], [rat(1)])
    if not mc.B.equals(Bder):
        return False
    return mc.B.mobius(_S).equals(mc.B)


# ---------------------------------------------------------------------------
# numerics: AGM, lambda^{-1} and H_{c,h}

def agm(a, b, maxiter: int = 64):
    """Arithmetic-geometric mean with the optimal square-root branch.

    At each step the sign of sqrt(a*b) is chosen to minimize
    |a' - b'|, which keeps the iteration on the branch that is
    continuous in the starting data.
    """
    a = mp.mpmathify(a)
    b = mp.mpmathify(b)
    if a == 0 or b == 0:
        raise ValueError("agm requires nonzero arguments")
    for _ in range(maxiter):
        if abs(a - b) <= mp.eps * (abs(a) + abs(b)):
            return (a + b) / 2
        am = (a + b) / 2
        gm = mp.sqrt(a * b)
        if abs(am - gm) > abs(am + gm):
            gm = -gm
        a, b = am, gm
    raise NonConvergence("agm failed to converge in %d iterations" % maxiter)


def hyp2f1_half_series(z, terms: int = 2000):
    """Direct partial sum of 2F1(1/2, 1/2; 1; z); test oracle, |z| < 1."""
    z = mp.mpmathify(z)
    acc = mp.mpf(1)
    term = mp.mpf(1)
    for n in range(1, terms):
        f = mp.mpf(2 * n - 1) / (2 * n)
        term = term * f * f * z
        acc += term
        if abs(term) < mp.eps * abs(acc):
            break
    return acc


def lambda_inv(z):
    """tau = lambda^{-1}(z) = i 2F1(.., 1-z)/2F1(.., z) via the AGM.

    Uses 2F1(1/2,1/2;1;w) = 1/agm(1, sqrt(1-w)); on the doubly sliced
    plane the principal square roots together with the optimal AGM
    branch give the branch with Im tau > 0.
    """
    z = mp.mpmathify(z)
    if z == 0 or z == 1:
        raise ValueError("lambda_inv undefined at z in {0, 1}")
    return mp.mpc(1j) * agm(1, mp.sqrt(1 - z)) / agm(1, mp.sqrt(z))


def eval_H(c, h, z):
    """H_{c,h}(z) = (1/(z(1-z)))^(c/24) exp(2 pi i (-c/24 + h) tau)."""
    z = mp.mpmathify(z)
    if z == 0 or z == 1:
        raise ValueError("H_{c,h} undefined at z in {0, 1}")
    c = mp.mpf(c)
    h = mp.mpf(h)
    tau = lambda_inv(z)
    pref = (1 / (z * (1 - z))) ** (c / 24)
    return pref * mp.exp(2 * mp.pi * mp.mpc(1j) * (-c / 24 + h) * tau)


# ---------------------------------------------------------------------------
# quadrature

@dataclass
class QuadratureConfig:
    """tanh-sinh quadrature settings for the contour integrals."""
    scheme: str = "tanh-sinh"
    level: int = 9
    abs_tol: float = 1e-24
    rel_tol: float = 1e-12
    height: float = 40.0  # split point of the vertical contour
    precision: int = 128


def _quad(f, a, b, quad: QuadratureConfig):
    # quadrature runs at doubled precision: the tanh-sinh node layout
    # near endpoint singularities loses roughly half the digits of the
    # prevailing precision before the level estimate notices
    with mp.workprec(mp.mp.prec * 2):
        val, err = mp.quad(f, [a, b], error=True, maxdegree=quad.level)
    if err > mp.mpf(quad.abs_tol) + mp.mpf(quad.rel_tol) * abs(val):
        raise ToleranceNotMet(
            "quadrature error estimate %s exceeds tolerance" % mp.nstr(err, 5))
    return val


def f_sine(c, h, quad: Optional[QuadratureConfig] = None):
    """f_c(h) = 2 sin^2(h pi) int_0^1 H_{c,h} A_c dz for h > c/16 + 1/2.

    The integrand behaves like z^(-c/8+2h-2) at 0 and (1-z)^(c/12) at
    1; tanh-sinh quadrature absorbs both power endpoints.  Close to the
    convergence edge the integral develops a simple pole, so inputs
    with h - (c/16 + 1/2) < 1e-3 are refused in favor of
    contour_functional.
    """
    quad = quad or QuadratureConfig()
    mc = magic_charge(c)
    hval = mp.mpf(h)
    edge = mp.mpf(c) / 16 + mp.mpf(1) / 2
    if hval - edge < mp.mpf("1e-3"):
        raise ValueError("h too close to c/16 + 1/2; use contour_functional")
    with working_precision(quad.precision):
        # the integrand behaves like z^alpha with alpha = 2h - c/8 - 2
        # in (-1, 0) near the origin; the substitution z = u^m with
        # m ~ 1/(alpha+1) flattens it so tanh-sinh converges at full
        # precision instead of plateauing
        alpha1 = 2 * (hval - edge)  # alpha + 1
        m = max(1, min(40, int(mp.ceil(mp.mpf("0.5") / alpha1))))
        integral = _quad(
            lambda u: eval_H(c, hval, u ** m) * mc.A_val(u ** m)
            * m * u ** (m - 1),
            mp.mpf(0), mp.mpf(1), quad)
        value = 2 * mp.sin(hval * mp.pi) ** 2 * integral
        if abs(mp.im(value)) > mp.mpf(quad.rel_tol) * (1 + abs(value)):
            raise ToleranceNotMet("sine integral has a nonreal residue")
        return mp.re(value)


def contour_functional(c, h, quad: Optional[QuadratureConfig] = None):
    """D_c[H_{c,h}|(id-S)]: real segment plus truncated vertical line.

    phi(z) = H_{c,h}(z) - H_{c,h}(1-z) is paired with A_c on [1/2, 1]
    and with B_c/2 on the line z = 1/2 + i t.  The line integrand only
    decays like t^(-c/12-2), far too slowly for any fixed truncation
    height, so the quadrature runs on [0, height] plus a tanh-sinh
    pass on [height, inf) under the substitution t -> height/u.
    """
    quad = quad or QuadratureConfig()
    mc = magic_charge(c)
    hval = mp.mpf(h)
    if hval < 0:
        raise ValueError("contour functional needs h >= 0")
    with working_precision(quad.precision):
        def phi(z):
            return eval_H(c, hval, z) - eval_H(c, hval, 1 - z)

        seg = _quad(lambda z: phi(z) * mc.A_val(z), mp.mpf(0.5), mp.mpf(1), quad)
        half = mp.mpf(0.5)

        def vert(t):
            z = mp.mpc(half, t)
            return phi(z) * mc.B_val(z)

        T = mp.mpf(quad.height)
        line = _quad(vert, mp.mpf(0), T, quad)
        # map [T, inf) to (0, 1] by t = T/u; the transformed integrand
        # vanishes like u^(c/12) at 0, which tanh-sinh absorbs
        line += _quad(lambda u: vert(T / u) * T / u ** 2,
                      mp.mpf(0), mp.mpf(1), quad)
        value = seg + line * mp.mpc(1j) / 2
        if abs(mp.im(value)) > mp.mpf(quad.rel_tol) * (1 + abs(value)):
            raise ToleranceNotMet("contour integral has a nonreal residue")
        return mp.re(value)


def zero_ladder(c, count: int, quad: Optional[QuadratureConfig] = None):
    """f_c at the predicted zeros h = c/16 + 1/2 + n, n = 0..count-1.

    The n = 0 endpoint is a 0 * inf balance in the sine formula, so it
    goes through the contour functional; the rest use the sine
    integral directly.
    """
    if count > 5:
        raise ValueError("ladder sampling is limited to five rungs")
    quad = quad or QuadratureConfig()
    edge = mp.mpf(c) / 16 + mp.mpf(1) / 2
    out = []
    for n in range(count):
        h = edge + n
        if n == 0:
            out.append(contour_functional(c, h, quad))
        else:
            out.append(f_sine(c, h, quad))
    return out
