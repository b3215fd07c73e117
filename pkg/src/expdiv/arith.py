"""Base arithmetic: factorization, divisor-type functions, real zeta values.

Multiplicative functions are described symbolically by small frozen
dataclasses (``TauK(3)``, ``GaussTau()``, ``EPower(TauK(2), 2)`` ...) that
know their value at a prime power.  Evaluation at an arbitrary ``n`` goes
through :func:`factorize`, which uses a smallest-prime-factor table.
"""

from __future__ import annotations

import math
import os
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np
from sympy import factorint

DEFAULT_SIEVE_BOUND = 10**8

_spf_lock = threading.Lock()
_spf: np.ndarray = np.zeros(2, dtype=np.int32)


def sieve_bound() -> int:
    """Largest n served from the smallest-prime-factor table."""
    return int(float(os.environ.get("EXPDIV_SIEVE_BOUND", DEFAULT_SIEVE_BOUND)))


def _build_spf(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
            spf[p] = p
    rest = spf == 0
    spf[rest] = np.nonzero(rest)[0]
    return spf


def spf_table(limit: int) -> np.ndarray:
    """Smallest-prime-factor table covering at least ``limit``.

    The table only grows; readers get an immutable snapshot.
    """
    global _spf
    table = _spf
    if len(table) > limit:
        return table
    limit = min(max(limit, 2 * (len(table) - 1), 1 << 16), max(sieve_bound(), limit))
    with _spf_lock:
        if len(_spf) <= limit:
            new = _build_spf(limit)
            new.setflags(write=False)
            _spf = new
        return _spf


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.nonzero(is_p)[0].astype(np.int64)


def factorize(n: int) -> list[tuple[int, int]]:
    """Canonical factorization ``[(p, a), ...]`` with ascending primes.

    >>> factorize(12)
    [(2, 2), (3, 1)]
    >>> factorize(1)
    []
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    out: list[tuple[int, int]] = []
    # powers of two are common (tower arguments); strip them by bit twiddling
    twos = (n & -n).bit_length() - 1
    if twos:
        out.append((2, twos))
        n >>= twos
    if n == 1:
        return out
    if n <= sieve_bound():
        spf = spf_table(n)
        while n > 1:
            p = int(spf[n])
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        return out
    return out + _large_factorize(n)


def _large_factorize(n: int) -> list[tuple[int, int]]:
    # beyond the sieve: sympy's trial division + Pollard rho/p-1 + ECM
    return sorted((int(p), int(a)) for p, a in factorint(n).items())


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, a in factorize(n):
        divs = [d * p**i for d in divs for i in range(a + 1)]
    return sorted(divs)


# -- local (prime power) values -------------------------------------------


@lru_cache(maxsize=None)
def _tau_multi_local(a: tuple[int, ...], e: int) -> int:
    # number of (e_1..e_k) >= 0 with sum a_i e_i = e
    ways = [1] + [0] * e
    for ai in a:
        for j in range(ai, e + 1):
            ways[j] += ways[j - ai]
    return ways[e]


def _gauss_local(p: int, a: int) -> int:
    if p == 2:
        return 2 * a + 1
    if p % 4 == 1:
        return (a + 1) ** 2
    return a + 1


def _check_n(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"arithmetic functions are defined on n >= 1, got {n}")
    return n


def tau_multi(a: Sequence[int], n: int) -> int:
    """Number of ordered tuples (d_1..d_k) with prod d_i**a_i == n."""
    a = tuple(int(x) for x in a)
    if not a:
        raise ValueError("tau_multi needs a non-empty exponent tuple")
    if min(a) < 1:
        raise ValueError(f"exponents must be >= 1, got {a}")
    return math.prod(_tau_multi_local(a, e) for _, e in factorize(_check_n(n)))


def tau_k(k: int, n: int) -> int:
    """k-dimensional divisor function; tau_k(2, n) is the usual tau(n)."""
    if k < 1:
        raise ValueError(f"tau_k needs k >= 1, got {k}")
    return math.prod(math.comb(e + k - 1, k - 1) for _, e in factorize(_check_n(n)))


def mobius_scaled(k: int, n: int) -> int:
    """mu(m) if n == m**k, else 0.  Generating series 1/zeta(k s)."""
    if k < 1:
        raise ValueError(f"scale must be >= 1, got {k}")
    val = 1
    for _, e in factorize(_check_n(n)):
        if e != k:
            return 0
        val = -val
    return val


def mobius_power(k: int, n: int) -> int:
    """Dirichlet inverse of tau_k: generating series zeta(s)**(-k)."""
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    val = 1
    for _, e in factorize(_check_n(n)):
        if e > k:
            return 0
        val *= (-1) ** e * math.comb(k, e)
    return val


def gauss_tau(n: int) -> int:
    """Number of Gaussian integers dividing n, counted up to units."""
    return math.prod(_gauss_local(p, a) for p, a in factorize(_check_n(n)))


# -- symbolic descriptors --------------------------------------------------


class ArithmeticFunction:
    """Anything that can be evaluated at positive integers."""

    multiplicative = False
    prime_independent = False

    def __call__(self, n: int):
        raise NotImplementedError

    @property
    def name(self) -> str:
        return repr(self)


class MultiplicativeSpec(ArithmeticFunction):
    """A multiplicative function given by its values at prime powers."""

    multiplicative = True
    prime_independent = True

    def local(self, p: int, a: int):
        raise NotImplementedError

    def __call__(self, n: int):
        val = 1
        for p, a in factorize(_check_n(n)):
            val *= self.local(p, a)
            if val == 0:
                return 0
        return val


@dataclass(frozen=True)
class One(MultiplicativeSpec):
    def local(self, p, a):
        return 1

    @property
    def name(self):
        return "one"


@dataclass(frozen=True)
class TauMulti(MultiplicativeSpec):
    a: tuple[int, ...]

    def __post_init__(self):
        if not self.a or min(self.a) < 1:
            raise ValueError(f"bad exponent tuple {self.a}")

    def local(self, p, a):
        return _tau_multi_local(tuple(self.a), a)

    @property
    def name(self):
        return "tau(" + ",".join(map(str, self.a)) + ")"


@dataclass(frozen=True)
class TauK(MultiplicativeSpec):
    k: int = 2

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"tau_k needs k >= 1, got {self.k}")

    def local(self, p, a):
        return math.comb(a + self.k - 1, self.k - 1)

    @property
    def name(self):
        return "tau" if self.k == 2 else f"tau{self.k}"


@dataclass(frozen=True)
class MobiusScaled(MultiplicativeSpec):
    k: int = 1

    def local(self, p, a):
        return 1 if a == 0 else (-1 if a == self.k else 0)

    @property
    def name(self):
        return f"muscaled{self.k}"


@dataclass(frozen=True)
class MobiusPower(MultiplicativeSpec):
    k: int = 1

    def local(self, p, a):
        return (-1) ** a * math.comb(self.k, a) if a <= self.k else 0

    @property
    def name(self):
        return "mu" if self.k == 1 else f"mu{self.k}"


@dataclass(frozen=True)
class GaussTau(MultiplicativeSpec):
    prime_independent = False

    def local(self, p, a):
        return _gauss_local(p, a)

    @property
    def name(self):
        return "gauss"


@dataclass(frozen=True)
class EPower(MultiplicativeSpec):
    """E applied ``m`` times to ``base`` (m >= 1)."""

    base: ArithmeticFunction
    m: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("EPower needs m >= 1; use the base itself for m = 0")

    def local(self, p, a):
        if a == 0:
            return 1
        from .eop import e_power_eval

        return e_power_eval(self.base, self.m - 1, a)

    @property
    def name(self):
        return f"E{self.m if self.m > 1 else ''}{self.base.name}"


_NAME_RE = re.compile(r"^E(\d*)(.+)$")


def parse_function(name: str) -> MultiplicativeSpec:
    """Inverse of ``.name``: 'tau', 'tau3', 'mu', 'mu2', 'muscaled4', 'gauss', 'one',
    'tau(1,2)', optionally prefixed by E or E<m> ('Etau', 'E2tau', 'E3tau3', 'Egauss')."""
    text = name.strip()
    m = _NAME_RE.match(text)
    if m:
        depth = int(m.group(1)) if m.group(1) else 1
        if depth < 1:
            raise ValueError(f"bad E power in {name!r}")
        return EPower(parse_function(m.group(2)), depth)
    if text == "one":
        return One()
    if text == "tau":
        return TauK(2)
    if text == "gauss":
        return GaussTau()
    if text == "mu":
        return MobiusPower(1)
    for prefix, cls in (("muscaled", MobiusScaled), ("mu", MobiusPower), ("tau", TauK)):
        rest = text[len(prefix):]
        if text.startswith(prefix) and rest.isdigit():
            k = int(rest)
            if k < 1:
                raise ValueError(f"parameter out of range in {name!r}")
            return cls(k)
    tm = re.match(r"^tau\((\d+(?:,\d+)*)\)$", text.replace(" ", ""))
    if tm:
        return TauMulti(tuple(int(x) for x in tm.group(1).split(",")))
    raise ValueError(f"unknown function {name!r}")


@dataclass(frozen=True)
class DirichletConvolution(MultiplicativeSpec):
    f: MultiplicativeSpec
    g: MultiplicativeSpec

    @property
    def prime_independent(self):
        return self.f.prime_independent and self.g.prime_independent

    def local(self, p, a):
        return sum(self.f.local(p, i) * self.g.local(p, a - i) for i in range(a + 1))

    @property
    def name(self):
        return f"({self.f.name}*{self.g.name})"


@dataclass(frozen=True)
class ValueTable(ArithmeticFunction):
    """Explicit arithmetic function on 1..len(values); not assumed multiplicative."""

    values: tuple

    @classmethod
    def of(cls, f, size: int) -> "ValueTable":
        return cls(tuple(f(n) for n in range(1, size + 1)))

    @property
    def size(self) -> int:
        return len(self.values)

    def __call__(self, n):
        n = _check_n(n)
        if n > len(self.values):
            raise ValueError(f"value table defined only up to {len(self.values)}, asked for {n}")
        return self.values[n - 1]

    def __add__(self, other: "ValueTable") -> "ValueTable":
        size = min(self.size, other.size)
        return ValueTable(tuple(x + y for x, y in zip(self.values[:size], other.values)))

    def __mul__(self, other: "ValueTable") -> "ValueTable":
        size = min(self.size, other.size)
        return ValueTable(tuple(x * y for x, y in zip(self.values[:size], other.values)))

    @property
    def name(self):
        return "table[" + ",".join(map(str, self.values[:6])) + ("...]" if self.size > 6 else "]")


def dirichlet_convolve(f, g, size: int) -> ValueTable:
    """(f * g)(n) = sum_{d | n} f(d) g(n/d) for n <= size, as a table."""
    out = [0] * (size + 1)
    for d in range(1, size + 1):
        fd = f(d)
        if fd == 0:
            continue
        for q in range(1, size // d + 1):
            out[d * q] += fd * g(q)
    return ValueTable(tuple(out[1:]))


# -- zeta at real arguments ------------------------------------------------


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def zeta_real(sigma, precision: int = 15):
    """Riemann zeta at a real argument by Euler-Maclaurin summation.

    The Bernoulli tail is truncated once the last included term, which
    bounds the remainder for real arguments, drops below
    ``10**-precision / 10``.  Returns an ``mpmath.mpf``.
    """
    if precision > 50 or precision < 1:
        raise ValueError("precision must be in 1..50 digits")
    with mpmath.workdps(precision + 15):
        s = _to_mpf(sigma)
        if s == 1:
            raise ValueError("zeta has a pole at 1")
        if s < -20:
            raise ValueError("zeta_real supports sigma > -20 only")
        target = mpmath.mpf(10) ** (-precision - 1)
        N = max(10, 2 * precision)
        while True:
            value, ok = _em_sum(s, N, target)
            if ok:
                return +value
            N *= 2


def _em_sum(s, N, target):
    total = mpmath.fsum(mpmath.power(n, -s) for n in range(1, N))
    total += mpmath.power(N, 1 - s) / (s - 1) + mpmath.power(N, -s) / 2
    rising = s  # s (s+1) ... (s+2j-2)
    prev = None
    for j in range(1, 200):
        term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * mpmath.power(N, -s - 2 * j + 1)
        total += term
        # remainder after j terms is bounded by |term| once s + 2j - 1 > 0
        if s + 2 * j - 1 > 0 and abs(term) < target:
            return total, True
        if term == 0:
            return total, True
        if prev is not None and abs(term) > abs(prev) and s + 2 * j - 1 > 0:
            return total, False
        prev = term
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return total, False
