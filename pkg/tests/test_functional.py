"""Derivative polynomials p_m and the odd-functional annihilation property."""

import random

import mpmath as mp
import pytest

from dualbound.exactfield import rat, working_precision
from dualbound.functional import (
    FunctionalSpec,
    deriv_polys,
    eval_p,
    vacuum_terms,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        FunctionalSpec("sphere", 8, 12)
    with pytest.raises(ValueError):
        FunctionalSpec("voa", 8, 0)


def test_flavor_data():
    lat = FunctionalSpec("lattice", 8, 4)
    assert lat.alpha == rat(2) and lat.delta == 0 and lat.delta0 == 1
    voa = FunctionalSpec("voa", 24, 4)
    assert voa.alpha == rat(1, 4)
    assert voa.delta == rat(-23, 24)
    assert voa.delta0 == 2


def test_p0_p1_p2_closed_forms():
    spec = FunctionalSpec("lattice", 8, 3)
    polys = deriv_polys(spec)
    a = spec.alpha
    # (t d/dt)[t^a e^(-bt)] = (a - bt) t^a e^(-bt): p_1 = a - b
    assert polys[0].coeffs == (rat(1),)
    assert polys[1].coeffs == (a, rat(-1))
    # p_2 = a^2 - (2a+1) b + b^2
    assert polys[2].coeffs == (a * a, -(2 * a + 1), rat(1))


def test_pm_matches_numerical_differentiation():
    # oracle: (t d/dt)^m f(t) at t=1 equals d^m/du^m f(e^u) at u=0
    spec = FunctionalSpec("voa", 24, 4, precision=256)
    polys = deriv_polys(spec)
    with working_precision(256):
        alpha = mp.mpf(spec.alpha.numerator) / mp.mpf(spec.alpha.denominator)
        beta = mp.mpf("1.75")
        for m in range(9):
            want = polys[m](beta) * mp.e ** (-beta)
            got = mp.diff(
                lambda u: mp.e ** (alpha * u) * mp.e ** (-beta * mp.e ** u),
                mp.mpf(0), m)
            assert abs(got - want) < mp.mpf(10) ** (-40) * (1 + abs(want)), m


def test_eval_p_bounds_check():
    spec = FunctionalSpec("lattice", 8, 2)
    with pytest.raises(ValueError):
        eval_p(spec, 6, 1)  # only orders 0..5 exist for N = 2


def test_annihilation_property_100_draws():
    # D = sum over odd m of a_m (t d/dt)^m annihilates g(t) + g(1/t)
    # for g(t) = t^alpha e^(-beta t); checked against straight numerical
    # differentiation in u = log t at 256 bits
    rng = random.Random(31415)
    with working_precision(256):
        tol = mp.mpf(10) ** (-64)  # 10^(-P/4)
        for draw in range(100):
            n = rng.randint(1, 4)
            flavor = rng.choice(["lattice", "voa"])
            param = rng.choice([rat(8), rat(24), rat(8, 7), rat(47, 2)])
            spec = FunctionalSpec(flavor, param, n, precision=256)
            polys = deriv_polys(spec)
            alpha = mp.mpf(spec.alpha.numerator) / mp.mpf(spec.alpha.denominator)
            beta = spec.beta(mp.mpf(rng.uniform(0.1, 4.0)))
            a = [mp.mpf(rng.uniform(-2, 2)) for _ in range(n + 1)]

            def even_pair(u):
                return (mp.e ** (alpha * u) * mp.e ** (-beta * mp.e ** u)
                        + mp.e ** (-alpha * u) * mp.e ** (-beta * mp.e ** (-u)))

            total = mp.mpf(0)
            scale = mp.mpf(0)
            for i, am in enumerate(a):
                m = 2 * i + 1
                d = mp.diff(even_pair, mp.mpf(0), m)
                total += am * d
                # typical size of one one-sided term for relative scaling
                scale += abs(am * polys[m](beta) * mp.e ** (-beta))
            assert abs(total) < tol * (1 + scale), (draw, flavor, str(param))


def test_vacuum_terms_lattice_match_eval_p():
    spec = FunctionalSpec("lattice", 8, 3, precision=256)
    terms = vacuum_terms(spec)
    with working_precision(256):
        b0 = spec.beta(0)
        for t in terms:
            want = eval_p(spec, t.order, 0) * mp.e ** (-b0)
            assert abs(t.value - want) < mp.mpf(10) ** (-70)


def test_vacuum_terms_voa_two_term_structure():
    spec = FunctionalSpec("voa", 24, 3, precision=256)
    terms = vacuum_terms(spec)
    assert [t.order for t in terms] == [1, 3, 5, 7]
    with working_precision(256):
        b0, b1 = spec.beta(0), spec.beta(1)
        for t in terms:
            want = (eval_p(spec, t.order, 0) * mp.e ** (-b0)
                    - eval_p(spec, t.order, 1) * mp.e ** (-b1))
            assert abs(t.value - want) < mp.mpf(10) ** (-70)
