"""Odd-derivative linear functionals acting on spectral theta/character data.

The functional is D = sum_m a_{2m+1} (t d/dt)^{2m+1} evaluated at t = 1,
applied term by term to e^{-beta t} with beta = 2 pi (h + delta).  Acting
on a single exponential the iterated operator produces

    (t d/dt)^m [t^alpha e^{-beta t}] |_{t=1} = p_m(beta) e^{-beta},

where the p_m are polynomials in beta generated by the recurrence below.
``alpha`` and ``delta`` are flavor data: alpha = n/4, delta = 0 for a
lattice of rank n, and alpha = 1/4, delta = (1 - c)/24 for a chiral CFT
of central charge c.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import mpmath as mp

from .exactfield import Rat, rat, working_precision

__all__ = [
    "DerivPoly",
    "FunctionalSpec",
    "VacuumTerm",
    "deriv_polys",
    "eval_p",
    "vacuum_terms",
]


@dataclass(frozen=True)
class DerivPoly:
    """p_m(beta) = sum_k coeffs[k] beta^k, with exact rational coefficients."""
    order: int
    coeffs: Tuple[Rat, ...]

    def __call__(self, beta):
        acc = mp.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * beta + mp.mpf(c.numerator) / mp.mpf(c.denominator)
        return acc


@dataclass(frozen=True)
class FunctionalSpec:
    """Which flavor of functional, how many derivative orders, what precision.

    flavor is 'lattice' (parameter = rank n) or 'voa' (parameter =
    central charge c).  N is the number of odd derivative orders used,
    i.e. the functional involves (t d/dt)^1, ..., (t d/dt)^(2N+1)
    together with the identity term absorbed at order 0.
    """
    flavor: str
    parameter: Rat
    N: int
    precision: int = 256

    def __post_init__(self):
        if self.flavor not in ("lattice", "voa"):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        object.__setattr__(self, "parameter", rat(self.parameter))

    @property
    def alpha(self) -> Rat:
        if self.flavor == "lattice":
            return self.parameter / 4
        return rat(1, 4)

    @property
    def delta(self) -> Rat:
        if self.flavor == "lattice":
            return rat(0)
        return (1 - self.parameter) / 24

    @property
    def delta0(self) -> Rat:
        """Normalized spectral gap of the trivial solution: n/8 or c/12."""
        if self.flavor == "lattice":
            return self.parameter / 8
        return self.parameter / 12

    def beta(self, h):
        """beta = 2 pi (h + delta) at the working precision."""
        with working_precision(self.precision):
            d = self.delta
            return 2 * mp.pi * (mp.mpf(h) + mp.mpf(d.numerator) / mp.mpf(d.denominator))


def deriv_polys(spec: FunctionalSpec) -> List[DerivPoly]:
    """p_0, ..., p_{2N+1} from the recurrence

        Q_0 = 1,   Q_{m+1} = t dQ_m/dt + (alpha - beta t) Q_m,

    carried out in Q[t, beta] and evaluated at t = 1.  Index m of the
    returned list is p_m; the functional only uses the odd ones (and
    p_0 = 1 for the constant term) but all are produced for testing.
    """
    alpha = spec.alpha
    top = 2 * spec.N + 1
    # Q_m as dict {(i, k): coeff of t^i beta^k}
    q = {(0, 0): rat(1)}
    out = [DerivPoly(0, (rat(1),))]
    for m in range(top):
        nxt: dict = {}
        for (i, k), c in q.items():
            if i:
                nxt[(i, k)] = nxt.get((i, k), rat(0)) + c * i
            nxt[(i, k)] = nxt.get((i, k), rat(0)) + c * alpha
            nxt[(i + 1, k + 1)] = nxt.get((i + 1, k + 1), rat(0)) - c
        q = {key: c for key, c in nxt.items() if c != 0}
        deg = max((k for (_, k) in q), default=0)
        coeffs = [rat(0)] * (deg + 1)
        for (_, k), c in q.items():
            coeffs[k] = coeffs[k] + c
        out.append(DerivPoly(m + 1, tuple(coeffs)))
    return out


def eval_p(spec: FunctionalSpec, m: int, h) -> mp.mpf:
    """p_m(beta(h)) at the spec's working precision."""
    polys = deriv_polys(spec)
    if not 0 <= m < len(polys):
        raise ValueError(f"order {m} out of range for N = {spec.N}")
    with working_precision(spec.precision):
        return polys[m](spec.beta(h))


@dataclass(frozen=True)
class VacuumTerm:
    """Coefficient r_{2m+1} of a_{2m+1} in the functional's vacuum value."""
    order: int
    value: mp.mpf


def vacuum_terms(spec: FunctionalSpec, *,
                 leading_only: bool = False) -> List[VacuumTerm]:
    """The vacuum contributions r_1, r_3, ..., r_{2N+1}.

    For the lattice flavor the vacuum state is the single exponential
    at h = 0.  For the voa flavor the vacuum character contributes
    e^{-beta_0} - q e^{-beta_0} in the leading two exponentials, i.e.

        r_{2m+1} = p_{2m+1}(beta(0)) e^{-beta(0)}
                 - p_{2m+1}(beta(1)) e^{-beta(1)},

    reflecting the (1 - q) factor of the vacuum module.

    With ``leading_only`` the subtracted level-one exponential is
    dropped and only the h = 0 term is returned.  The bound pipeline
    normalizes on this leading term: at small central charge the
    level-one polynomial weights p_{2m+1}(beta(1)) grow factorially
    with the order and would otherwise dominate the normalization
    direction, shifting the reported thresholds.
    """
    polys = deriv_polys(spec)
    out = []
    with working_precision(spec.precision):
        b0 = spec.beta(0)
        e0 = mp.e ** (-b0)
        if spec.flavor == "voa" and not leading_only:
            b1 = spec.beta(1)
            e1 = mp.e ** (-b1)
        for m in range(spec.N + 1):
            order = 2 * m + 1
            v = polys[order](b0) * e0
            if spec.flavor == "voa" and not leading_only:
                v = v - polys[order](b1) * e1
            out.append(VacuumTerm(order=order, value=v))
    return out
