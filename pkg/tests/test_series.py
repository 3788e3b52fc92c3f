import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from catpaths import brute as B
from catpaths import series as S
from catpaths.errors import UnknownParam
from catpaths.model import DYCK, MOTZKIN, JumpSet

from .conftest import jumpsets


def test_dyck_excursions_and_meanders():
    assert list(S.f0_series(DYCK, 7).coeffs) == [1, 0, 1, 1, 3, 5, 12, 23]
    assert list(S.f_series(DYCK, 6).coeffs) == [1, 1, 2, 4, 8, 17, 35]


def test_catastrophe_free_excursions_are_catalan():
    e = S.e_series(DYCK, 20)
    assert [e[2 * m] for m in range(11)] == [math.comb(2 * m, m) // (m + 1) for m in range(11)]
    assert all(e[2 * m + 1] == 0 for m in range(10))


def test_meanders_are_central_binomials():
    m = S.m_series(DYCK, 15)
    assert [m[n] for n in range(16)] == [math.comb(n, n // 2) for n in range(16)]


def test_identity_F0_is_D_times_E():
    J = JumpSet.parse("-2:1/2,1:1,2:1/3,q=2/3")
    N = 15
    assert S.f0_series(J, N).coeffs == (S.d_series(J, N) * S.e_series(J, N)).coeffs
    D = S.d_series(J, N)
    assert (D * (1 - S.q_series(J, N))).coeffs == S.Series.one(N).coeffs


def test_q_bivariate_marginal():
    J = MOTZKIN
    assert S.q_bivariate(J, 12).marginal().coeffs == S.q_series(J, 12).coeffs


def test_dyck_q_has_no_size_one_or_zero():
    Qb = S.q_bivariate(DYCK, 12)
    assert all(Qb.coeff(n, 0) == 0 and Qb.coeff(n, 1) == 0 for n in range(13))


def test_arch_closed_form():
    a = S.arch_series(DYCK, 40)
    for n in range(3, 41):
        assert a.A_cat[n] == S.dyck_arch_closed_form(n)
    assert all(x >= 0 for x in a.A_nocat.coeffs)


def test_continued_fraction_matches_excursions():
    assert S.continued_fraction_H(30).coeffs == S.f0_series(DYCK, 30).coeffs


def test_parameter_series_marginals_are_F0():
    F0 = S.f0_series(MOTZKIN, 10)
    for param in ("catastrophes", "returns", "cumulative", "waiting"):
        assert S.parameter_series(MOTZKIN, 10, param).marginal().coeffs == F0.coeffs


def test_unknown_param():
    with pytest.raises(UnknownParam):
        S.parameter_series(DYCK, 5, "height")


def test_series_arithmetic():
    z = S.Series.z(6)
    one = S.Series.one(6)
    geo = (one - z).reciprocal()
    assert geo.coeffs == (1,) * 7
    assert (geo * (one - z)).coeffs == one.coeffs
    half = S.Series((Fraction(2), Fraction(1, 3), 0, 0))
    assert (half * half.reciprocal()).coeffs == S.Series.one(3).coeffs
    assert geo.shift(2).coeffs[:3] == (0, 0, 1)
    assert S.Series.from_json(geo.to_json()) == geo


@given(jumpsets(), st.integers(0, 7))
def test_series_match_brute_force(J, n):
    census = B.Census(J, n)
    assert S.f0_series(J, n)[n] == census.excursion_total(J, n)
    assert S.f_series(J, n)[n] == census.meander_total(J, n)
    for param in S.PARAMS:
        row = S.parameter_series(J, n, param).rows[n]
        want = census.weighted(J, param, n)
        for k in set(want) | set(range(len(row))):
            assert S.parameter_series(J, n, param).coeff(n, k) == want.get(k, 0), (param, k)


@given(jumpsets(), st.integers(0, 7))
def test_counting_table_final_altitudes(J, n):
    census = B.Census(J, n)
    table = S.counting_table(J, n)
    want = census.weighted(J, "final", n)
    for k in set(want) | set(range(len(table.rows[n]))):
        assert table.coeff(n, k) == want.get(k, 0)


@given(jumpsets(), jumpsets())
def test_cache_does_not_mix_jumpsets(J1, J2):
    a1 = S.f0_series(J1, 6)
    S.f0_series(J2, 6)
    assert S.f0_series(J1, 6) == a1
    assert a1[6] == B.Census(J1, 6).excursion_total(J1, 6)
