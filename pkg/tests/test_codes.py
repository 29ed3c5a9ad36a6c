"""Weight enumerators, MacWilliams transform, and the exact LP bound scan."""

import itertools

import pytest

from dualbound.codes import (
    QS_OPS,
    WeightEnumerator,
    bound_record,
    code_bound,
    code_lp,
    invariant_basis,
    macwilliams,
    s_invariance_check,
)
from dualbound.exactfield import QSqrt2, rat


def _hamming8_words():
    # extended Hamming [8,4,4] code: spanned by four generators
    gens = [
        (1, 1, 1, 1, 0, 0, 0, 0),
        (0, 0, 1, 1, 1, 1, 0, 0),
        (0, 0, 0, 0, 1, 1, 1, 1),
        (0, 1, 0, 1, 0, 1, 0, 1),
    ]
    words = set()
    for picks in itertools.product((0, 1), repeat=4):
        w = [0] * 8
        for p, g in zip(picks, gens):
            if p:
                w = [(a + b) % 2 for a, b in zip(w, g)]
        words.add(tuple(w))
    return sorted(words)


def test_hamming8_enumerator_and_self_duality():
    w = WeightEnumerator.from_codewords(8, _hamming8_words())
    assert w.coeffs == tuple(rat(c) for c in (1, 0, 0, 0, 14, 0, 0, 0, 1))
    # self-dual: the MacWilliams transform with index 1 is a fixed point
    assert macwilliams(w, 1) == w


def test_macwilliams_is_an_involution():
    # length-3 repetition code {000, 111}: dual is the parity-check code
    rep = WeightEnumerator(3, (1, 0, 0, 1))
    dual = macwilliams(rep, 2)  # |Cperp| / |C| = 4 / 2
    assert dual.coeffs == tuple(rat(c) for c in (1, 0, 3, 0))
    back = macwilliams(dual, rat(1, 2))
    assert back == rep


def test_macwilliams_rejects_non_power_of_two_index():
    rep = WeightEnumerator(3, (1, 0, 0, 1))
    with pytest.raises(ValueError):
        macwilliams(rep, 3)


def test_invariant_basis_is_s_invariant():
    for n in (1, 2, 3, 5, 8):
        basis = invariant_basis(n)
        assert len(basis) == n // 2 + 1
        for p in basis:
            assert p.degree == n
            assert s_invariance_check(p)


def test_non_invariant_polynomial_detected():
    from dualbound.exactfield import HomoPoly2

    p = HomoPoly2(2, [QSqrt2(1, 0), QSqrt2(0, 0), QSqrt2(0, 0)])  # x^2
    assert not s_invariance_check(p)


def test_code_bound_small_goldens():
    for n, mu in [(1, 1), (2, 2), (8, 4), (12, 4), (16, 6), (24, 8)]:
        assert code_bound(n) == mu


def test_k_scan_stops_at_first_infeasibility():
    mu, outcomes = code_bound(16, return_outcomes=True)
    # the scan runs k = 1..mu; everything before mu is feasible
    assert [o.k for o in outcomes] == list(range(1, mu + 1))
    assert all(o.feasible for o in outcomes[:-1])
    assert not outcomes[-1].feasible


def test_infeasibility_certificate_reverifies():
    for n in (8, 12):
        mu, outcomes = code_bound(n, return_outcomes=True)
        out = outcomes[-1]
        assert out.k == mu and not out.feasible
        assert out.verify_infeasibility()


def test_objective_at_mu_minus_one_is_power_of_two():
    rec = bound_record(8)
    assert rec["n"] == 8
    assert rec["mu"] == 4
    obj = rec["objective_at_k_minus_1"]
    assert rat(obj["a"]) == rat(2) ** 4  # 2^{n/2} = 16
    assert rat(obj["b_sqrt2"]) == 0
    assert rec["farkas_verified"]


def test_code_lp_feasible_below_threshold():
    out = code_lp(8, 3)
    assert out.feasible
