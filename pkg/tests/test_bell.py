from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from expdiv.arith import EPower, GaussTau, One, TauK, ValueTable, gauss_tau, tau_k
from expdiv.bell import (
    LocalSeries,
    ZetaWord,
    exp_tau_k_word,
    gauss_exp_word,
    general_word,
    general_word_target,
    greedy_factor,
    local_series,
    tau_k_power_word,
    tau_power_word,
    verify_expansion,
    word_local_factor,
)
from expdiv.eop import oplus

tau = TauK(2)
Etau = EPower(tau, 1)
Egauss = EPower(GaussTau(), 1)


def coeffs(s):
    return [int(c) for c in s.coeffs]


def test_local_series_examples():
    assert coeffs(local_series(Etau, 6)) == [1, 1, 2, 2, 3, 2, 4]
    assert coeffs(local_series(One(), 5)) == [1] * 6
    assert coeffs(local_series(Egauss, 4)) == [1, 1, 3, 2, 5]


@pytest.mark.parametrize("p", [2, 3, 5, 13])
def test_local_series_prime_dependent(p):
    assert coeffs(local_series(GaussTau(), 5, p)) == [gauss_tau(p**n) for n in range(6)]
    with pytest.raises(ValueError):
        local_series(GaussTau(), 5)


def test_word_local_factor_examples():
    assert coeffs(word_local_factor(ZetaWord.of([(1, 1)]), 3)) == [1, 1, 1, 1]
    assert coeffs(word_local_factor(ZetaWord.of([(1, 1), (2, 1)]), 4)) == [1, 1, 2, 2, 3]
    assert coeffs(word_local_factor(ZetaWord.of([(1, 1), (2, 2), (3, -1)]), 4)) == [1, 1, 3, 2, 5]
    assert coeffs(word_local_factor(ZetaWord.of([(1, 1), (oplus(5), 3)]), 4)) == [1] * 5


def test_greedy_examples():
    w, r = greedy_factor(local_series(Etau, 4))
    assert w.as_pairs() == [(1, 1), (2, 1)] and coeffs(r) == [1, 0, 0, 0, 0]
    w, r = greedy_factor(local_series(One(), 10))
    assert w.as_pairs() == [(1, 1)] and coeffs(r) == [1] + [0] * 10


def test_greedy_on_tower_series():
    # the scale-16 word is the factor of E^3 tau, since E^3 tau(p^n) = E^2 tau(n) first differs from 1 at n = 16
    w, _ = greedy_factor(local_series(EPower(tau, 3), 48))
    assert w.as_pairs() == [(1, 1), (16, 1), (17, -1), (32, -1), (33, 1), (48, 1)]
    assert w.as_pairs() == tau_power_word(16).as_pairs()
    w4, _ = greedy_factor(local_series(EPower(tau, 4), 200))
    assert w4.as_pairs() == [(1, 1)]


def test_tower_word_residual_reports_next_degree():
    res = verify_expansion(EPower(tau, 3), tau_power_word(16), T=60)
    assert res.passed and res.next_nonzero_degree == 49 and res.residual[49] == -2


def test_tower_word_needs_two_iterations():
    res = verify_expansion(EPower(tau, 2), tau_power_word(4))
    assert not res.passed and res.first_bad_degree == 8 and res.bad_value == 1


def test_verify_examples():
    w9 = ZetaWord.of([(1, 1), (16, 2), (17, -2), (32, -3)])
    assert verify_expansion(EPower(TauK(3), 3), w9, claimed=33).passed
    assert w9.as_pairs() == tau_k_power_word(16, 3).as_pairs()
    assert verify_expansion(Egauss, gauss_exp_word()).passed
    res = verify_expansion(Etau, ZetaWord.of([(1, 1)]), claimed=3)
    assert not res.passed and res.first_bad_degree == 2 and res.bad_value == 1


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_exp_tau_k_words(k):
    assert verify_expansion(EPower(TauK(k), 1), exp_tau_k_word(k)).passed


@pytest.mark.parametrize("k", [3, 4])
def test_tau_k_tower_words(k):
    assert verify_expansion(EPower(TauK(k), 3), tau_k_power_word(16, k)).passed


def test_general_word_examples():
    t3 = ValueTable(tuple(tau_k(3, n) for n in range(1, 65)))
    w = general_word(t3, 2)
    assert w.as_pairs() == [(1, 1), (16, 2), (17, -2)] and w.claimed_order == 32
    assert verify_expansion(general_word_target(t3, 2), w).passed
    assert verify_expansion(EPower(TauK(3), 3), w).passed
    wt = general_word(tau, 2)
    assert wt.as_pairs() == [(1, 1), (16, 1), (17, -1)]
    assert verify_expansion(general_word_target(tau, 2), wt).passed
    with pytest.raises(ValueError):
        general_word(tau, 1)


def test_general_word_on_unmaterializable_scale():
    w = general_word(tau, 5)
    assert "zeta(2^2^65536s)" in str(w)


words = st.dictionaries(st.integers(1, 20), st.integers(-3, 3).filter(bool), min_size=1, max_size=6)


@settings(max_examples=100, deadline=None)
@given(words)
def test_greedy_inverts_word_expansion(d):
    w = ZetaWord.of(sorted(d.items()))
    w2, r = greedy_factor(word_local_factor(w, 20))
    assert w2.as_pairs() == w.as_pairs()
    assert all(c == 0 for c in r.coeffs[1:])


series = st.lists(st.integers(-9, 9), min_size=12, max_size=12).map(lambda v: LocalSeries(tuple([1] + v)))


@settings(max_examples=100)
@given(series, series)
def test_series_division_inverts_multiplication(a, b):
    assert (a * b) / b == a
    assert (a / b) * b == a


def test_zeta_word_validation():
    with pytest.raises(ValueError):
        ZetaWord(((1, 1), (1, 2)))
    with pytest.raises(ValueError):
        ZetaWord.parse("1:1,x")
    assert ZetaWord.parse("1:1, 16:1, 17:-1").as_pairs() == [(1, 1), (16, 1), (17, -1)]
    assert str(ZetaWord.of([(1, 1), (2, 2), (3, -1)])) == "zeta(s) zeta(2s)^2 / zeta(3s)"
    assert LocalSeries((1, Fraction(1, 2))).inverse().coeffs[1] == Fraction(-1, 2)
