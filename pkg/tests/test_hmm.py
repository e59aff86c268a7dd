from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minmult.duality import canonical_module
from minmult.generate import AlgebraShape, radical_square_quotient, random_module
from minmult.hmm import (
    CertificateError,
    PoincareSeries,
    check_hmm_certificate,
    check_shmm_certificate,
    classify_growth,
    convolve,
    detect_geometric_tail,
    from_betti,
    is_rational_square,
    predict_series,
    recover_ratio,
    series_product,
    verify_betti_laws,
    witness_type,
)
from minmult.modules import AModule, direct_power, free_module, residue_module

from conftest import F101, algebra_from, algebras, mm_ring


def test_witness_type_and_rejections():
    A = mm_ring(3)
    assert witness_type(free_module(A, 2)) == (2, 6)
    assert witness_type(residue_module(A, 3)) == (3, 0)
    B = algebra_from(F101, ["x"], 3)
    with pytest.raises(CertificateError) as err:
        witness_type(free_module(B, 1))
    assert err.value.witness is not None
    with pytest.raises(CertificateError):
        witness_type(AModule.zero(A))


@pytest.mark.parametrize("r", [1, 2, 3])
def test_ring_itself_certifies_minimal_multiplicity(r):
    A = mm_ring(r)
    cert = check_shmm_certificate(A, free_module(A, 1), 4)
    assert cert.certified and cert.type == (1, r)
    hmm = check_hmm_certificate(A, free_module(A, 1), 1, 4)
    assert hmm.certified and hmm.type == (1, r, 1)


def test_residue_field_is_rejected_over_non_gorenstein_ring():
    A = mm_ring(2)
    cert = check_hmm_certificate(A, residue_module(A), 1, 3)
    assert not cert.certified and cert.first_failure == 1
    assert "rejected" in cert.verdict
    assert not check_shmm_certificate(A, residue_module(A), 3).certified


@pytest.mark.parametrize("a,b,m", [(2, 2, 1), (3, 2, 2), (4, 4, 3)])
def test_gorenstein_residue_witness(a, b, m):
    A = algebra_from(F101, ["X", "Y"], a + b, [[(1, (a, 0))], [(1, (0, b))]])
    cert = check_shmm_certificate(A, residue_module(A, m), 4)
    assert cert.certified and cert.type == (m, 0)


def test_classify_growth():
    assert classify_growth(2, 6).kind == "exponential"
    assert classify_growth(2, 2).kind == "eventually_constant"
    assert classify_growth(3, 0).kind == "finite_pd_forces_gorenstein"
    assert classify_growth(2, 3, gorenstein_hint=False).kind == "divisibility_violation"
    assert classify_growth(2, 0, gorenstein_hint=False).kind == "divisibility_violation"
    assert classify_growth(2, 4, gorenstein_hint=False).m_divides_n
    with pytest.raises(ValueError):
        classify_growth(0, 1)


def test_recover_ratio_examples():
    assert recover_ratio(3, 8).value == 3
    assert recover_ratio(2, 3).value == 2
    assert recover_ratio(1, 0).value == 1
    # the root (1 + sqrt 5) / 2 is irrational: only an interval comes back
    res = recover_ratio(1, 1)
    assert res.value is None and not res.exact
    assert res.lower < (1 + 5 ** 0.5) / 2 < res.upper


@given(st.integers(1, 12), st.integers(1, 6))
def test_recover_ratio_inverts_canonical_formula(r, c):
    # beta_0 = c r, beta_1 = beta_0 (r^2 - 1) / r
    b0 = c * r
    assert recover_ratio(b0, c * (r * r - 1)).value == r


@given(st.integers(1, 50), st.integers(1, 50), st.sampled_from([2, 3, 5, 6, 7]))
def test_is_rational_square(a, b, k):
    assert is_rational_square(Fraction(a * a, b * b))
    assert not is_rational_square(Fraction(k * a * a, b * b))
    assert not is_rational_square(Fraction(-a * a, b * b))


def test_tail_detection():
    assert detect_geometric_tail([4, 12, 33, 84, 204, 480]) is None
    assert detect_geometric_tail([3, 8, 24, 72, 216]) == (1, 8, 3)
    assert detect_geometric_tail([1, 0, 0, 0, 0]) is None
    assert detect_geometric_tail([2, 2, 2, 2]) == (0, 2, 1)
    with pytest.raises(ValueError):
        detect_geometric_tail([1, 2, 4])


@given(st.integers(1, 5), st.integers(1, 9), st.lists(st.integers(1, 30), min_size=0, max_size=3),
       st.fractions(min_value=Fraction(1, 3), max_value=4, max_denominator=3))
def test_series_product_matches_convolution(c1, c2, head, r):
    P = PoincareSeries(tuple(head), (len(head), c1, r))
    Q = PoincareSeries((1,), (1, c2, r))
    prod = series_product(P, Q, terms=12)
    want = convolve(P.coefficients(14), Q.coefficients(14), 14)
    assert prod.coefficients(14) == want


def test_kunneth_product_closed_form():
    P = from_betti([2, 3, 6, 12, 24, 48])
    prod = series_product(P, P)
    assert prod.coefficients(5) == [4, 12, 33, 84, 204]
    t, a, b, r = prod.closed_form
    assert (t, a, b, r) == (2, 9, 15, 2)


def test_series_serialization_round_trip():
    for s in (from_betti([3, 8, 24, 72]), series_product(from_betti([2, 3, 6, 12]), from_betti([2, 3, 6, 12])),
              PoincareSeries((1, 2, 3))):
        assert PoincareSeries.from_dict(s.as_dict()) == s
    with pytest.raises(IndexError):
        PoincareSeries((1, 2, 3)).coefficient(3)
    with pytest.raises(ValueError):
        PoincareSeries((1,), (2, 1, 2))


def test_predict_series():
    s = predict_series(2, 6, 1, 8, [3])
    assert s.coefficients(5) == [3, 8, 24, 72, 216]
    zero = predict_series(2, 0, 1, 5, [1])
    assert zero.coefficients(3) == [1, 5, 0]


@settings(max_examples=10)
@given(algebras(shape=AlgebraShape(max_vars=4, max_nilpotency=2)))
def test_laws_hold_for_free_witness_over_radical_square_zero_rings(A):
    # every N has Tor_i(A, N) = 0, so the ratio law gives beta_{i+1} = e beta_i
    rng = np.random.default_rng(A.dim)
    N = random_module(rng, A)
    rep = verify_betti_laws(A, free_module(A, 1), N, 1, 3)
    assert rep.ok
    assert all(r.status != "fail" for r in rep.results)


@settings(max_examples=10)
@given(algebras(), st.integers(0, 1000))
def test_laws_never_fail_on_random_witnesses(A, seed):
    rng = np.random.default_rng(seed)
    M = radical_square_quotient(random_module(rng, A))
    rep = verify_betti_laws(A, M, canonical_module(A), 1, 3)
    assert rep.ok, [r for r in rep.results if r.status == "fail"]


def test_law_report_on_minimal_multiplicity_ring():
    A = mm_ring(3)
    rep = verify_betti_laws(A, direct_power(free_module(A, 1), 2), canonical_module(A), 1, 4)
    assert rep.ok
    assert rep.by_law("canonical_formula")[0].status == "pass"
    assert rep.by_law("ratio_recovery")[0].computed == 3
