import mpmath
from hypothesis import given, settings
from hypothesis import strategies as st

from dualbound.exactfield import (
    HomoPoly2,
    QSqrt2,
    Rat,
    qsqrt2_inv,
    qsqrt2_sign,
    rat,
    to_mpf,
    working_precision,
)

rats = st.builds(rat, st.integers(-50, 50),
                 st.integers(1, 50))
qs = st.builds(QSqrt2, rats, rats)


def test_rat_constructors():
    assert rat(3, 4) == rat("3/4")
    assert rat(6, 8) == rat(3, 4)
    assert rat(5) == 5


@given(qs, qs, qs)
@settings(max_examples=60, deadline=None)
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    assert x * y == y * x


@given(qs)
@settings(max_examples=60, deadline=None)
def test_inverse(x):
    if qsqrt2_sign(x) != 0:
        inv = qsqrt2_inv(x)
        assert x * inv == QSqrt2(1, 0)


@given(qs)
@settings(max_examples=60, deadline=None)
def test_sign_matches_float(x):
    with working_precision(64):
        v = float(x.a) + float(x.b) * 2 ** 0.5
    s = qsqrt2_sign(x)
    if abs(v) > 1e-12:
        assert s == (1 if v > 0 else -1)


def test_sqrt2_squares_to_two():
    r = QSqrt2.sqrt2()
    assert r * r == QSqrt2(2, 0)
    # sqrt2 is irrational: a + b sqrt2 = 0 only for a = b = 0
    assert qsqrt2_sign(QSqrt2(rat(-3), rat(2))) != 0


def test_working_precision_restores():
    before = mpmath.mp.prec
    with working_precision(100):
        assert mpmath.mp.prec == 100
    assert mpmath.mp.prec == before


def test_to_mpf_rounding():
    with working_precision(64):
        v = to_mpf(rat(1, 3), 64)
        assert abs(v - mpmath.mpf(1) / 3) < mpmath.mpf(2) ** -60


def test_homopoly_eval_and_mul():
    # x^2 + y^2 times x
    p = HomoPoly2(2, [QSqrt2(1, 0), QSqrt2(0, 0), QSqrt2(1, 0)])
    q = HomoPoly2(1, [QSqrt2(0, 0), QSqrt2(1, 0)])  # coefficient of x
    from dualbound.exactfield import homopoly_mul
    r = homopoly_mul(p, q)
    assert r.degree == 3
