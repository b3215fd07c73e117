import math
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from expdiv.arith import (
    DirichletConvolution,
    EPower,
    GaussTau,
    MobiusPower,
    MobiusScaled,
    One,
    TauK,
    TauMulti,
    ValueTable,
    dirichlet_convolve,
    divisors,
    factorize,
    gauss_tau,
    mobius_power,
    parse_function,
    primes_up_to,
    tau_k,
    tau_multi,
    zeta_real,
)


def test_factorize_examples():
    assert factorize(1) == []
    assert factorize(12) == [(2, 2), (3, 1)]
    assert factorize(65536) == [(2, 16)]
    with pytest.raises(ValueError):
        factorize(0)


def test_factorize_above_sieve_bound():
    p, q = 1_000_000_007, 998_244_353
    assert factorize(p * q * 4) == [(2, 2), (q, 1), (p, 1)]


@settings(deadline=None)
@given(st.integers(1, 10**7))
def test_factorize_reconstructs(n):
    fs = factorize(n)
    assert math.prod(p**a for p, a in fs) == n
    assert [p for p, _ in fs] == sorted({p for p, _ in fs})
    for p, a in fs:
        assert a >= 1 and all(p % d for d in range(2, math.isqrt(p) + 1))


def _tau_multi_enum(a, n):
    # count tuples (d_1..d_k) with prod d_i^a_i = n
    ranges = [[d for d in range(1, n + 1) if n % d**ai == 0] for ai in a]
    return sum(1 for ds in product(*ranges) if math.prod(d**ai for d, ai in zip(ds, a)) == n)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=3), st.integers(1, 120))
def test_tau_multi_against_enumeration(a, n):
    assert tau_multi(tuple(a), n) == _tau_multi_enum(a, n)


def test_tau_examples():
    assert tau_multi((1, 2), 4) == 2
    assert tau_k(3, 4) == 6
    assert [gauss_tau(n) for n in (2, 5, 9)] == [3, 4, 3]


def _gauss_brute(n):
    # Gaussian divisors of n up to units: representatives a > 0, b >= 0
    c = 0
    for a in range(1, n + 1):
        for b in range(0, n + 1):
            N = a * a + b * b
            if N > n * n:
                break
            # n / (a + bi) = n (a - bi) / N
            if (n * a) % N == 0 and (n * b) % N == 0:
                c += 1
    return c


def test_gauss_tau_brute_force():
    assert [gauss_tau(n) for n in range(1, 61)] == [_gauss_brute(n) for n in range(1, 61)]


def test_tau_k_iterated_convolution():
    size = 600
    t = ValueTable([1] * size)
    for k in range(2, 6):
        t = dirichlet_convolve(t, ValueTable([1] * size), size)
        assert all(t(n) == tau_k(k, n) for n in range(1, size + 1))


def test_mobius_inverts_one():
    conv = dirichlet_convolve(MobiusPower(1), One(), 200)
    assert [conv(n) for n in range(1, 201)] == [1] + [0] * 199
    assert mobius_power(1, 12) == 0 and mobius_power(2, 4) == 1


def test_specs_at_p0_and_prime_independence():
    specs = [One(), TauK(3), TauMulti((1, 2)), MobiusPower(2), MobiusScaled(3), EPower(TauK(2), 2)]
    for f in specs:
        assert f.local(2, 0) == 1
        assert all(f.local(2, a) == f.local(101, a) for a in range(8))
    assert GaussTau().local(5, 1) != GaussTau().local(3, 1)
    assert not GaussTau().prime_independent
    assert not DirichletConvolution(TauK(2), GaussTau()).prime_independent


def test_value_table_bounds():
    t = ValueTable([1, 2, 3])
    assert t(3) == 3
    with pytest.raises(ValueError):
        t(4)


def test_parse_function_round_trip():
    for name in ["one", "tau", "tau3", "mu", "mu2", "muscaled3", "gauss", "tau(1,2)", "Etau", "E2tau", "E3tau3", "Egauss"]:
        assert parse_function(name).name == name
    with pytest.raises(ValueError):
        parse_function("zeta")


def test_primes_up_to():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_up_to(10**5)) == 9592


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


# -- zeta ---------------------------------------------------------------------


def test_zeta_known_values():
    assert abs(zeta_real(2) - mpmath.pi**2 / 6) < 1e-14
    assert abs(zeta_real(0) + 0.5) < 1e-14
    assert abs(zeta_real(-1) + mpmath.mpf(1) / 12) < 1e-14
    assert abs(zeta_real(16) - 1.0000152822594) < 1e-12
    with mpmath.workdps(40):
        ref = mpmath.zeta(mpmath.mpf(1) / 2)
    assert abs(zeta_real(0.5, 30) - ref) < mpmath.mpf(10) ** -28


def test_zeta_errors():
    with pytest.raises(ValueError):
        zeta_real(1)
    with pytest.raises(ValueError):
        zeta_real(2, precision=0)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.05, 20))
def test_zeta_bracketed_by_integrals(s):
    # sum_{n<=N} n^-s + (N+1)^(1-s)/(s-1) <= zeta(s) <= sum_{n<=N} n^-s + N^(1-s)/(s-1)
    N = 200
    head = math.fsum(n**-s for n in range(1, N + 1))
    lo = head + (N + 1) ** (1 - s) / (s - 1)
    hi = head + N ** (1 - s) / (s - 1)
    z = float(zeta_real(s))
    assert lo - 1e-12 <= z <= hi + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.fractions(Fraction(-10), Fraction(10)).filter(lambda x: x != 1))
def test_zeta_matches_mpmath(s):
    with mpmath.workdps(40):
        ref = mpmath.zeta(mpmath.mpf(s.numerator) / s.denominator)
    assert abs(zeta_real(s, 20) - ref) < mpmath.mpf(10) ** -18 * max(1, abs(ref))
