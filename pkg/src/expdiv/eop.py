"""The E operator: (Ef)(p^a) = f(a), its iterates, supports and towers."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Optional, Union

from .util import fmt_big as _fmt_big
from .arith import (
    ArithmeticFunction,
    EPower,
    MultiplicativeSpec,
    One,
    ValueTable,
    divisors,
    factorize,
)

DIGIT_BOUND = 10**6
SCAN_LIMIT = 10**6
SUPPORT_SCAN_MAX = 10**7

_LOG2_10 = math.log2(10)


# -- tower integers --------------------------------------------------------


class TowerInt:
    """A natural number that may be too large to materialize.

    Either an exact ``int`` or ``mul * 2**exp + add`` where ``exp`` is
    itself a :class:`TowerInt` and ``2**exp`` has more than
    ``digit_bound`` decimal digits.  ``mul`` and ``add`` stay small; they
    exist so that doubling and +1 are total.
    """

    __slots__ = ("_exact", "_exp", "_mul", "_add")

    def __init__(self, exact=None, *, exp=None, mul=1, add=0):
        if (exact is None) == (exp is None):
            raise ValueError("TowerInt is either exact or a power-of-two tower")
        self._exact = None if exact is None else int(exact)
        self._exp = exp
        self._mul = mul
        self._add = add

    @classmethod
    def of(cls, value) -> "TowerInt":
        return value if isinstance(value, TowerInt) else cls(int(value))

    @property
    def is_exact(self) -> bool:
        return self._exact is not None

    @property
    def value(self) -> int:
        if self._exact is None:
            raise OverflowError(f"{self} is not materializable")
        return self._exact

    def pow2(self, digit_bound: int = DIGIT_BOUND) -> "TowerInt":
        """2 ** self."""
        if self._exact is not None and self._exact < digit_bound * _LOG2_10:
            return TowerInt(1 << self._exact)
        return TowerInt(exp=self)

    def double(self) -> "TowerInt":
        if self._exact is not None:
            return TowerInt(2 * self._exact)
        return TowerInt(exp=self._exp, mul=2 * self._mul, add=2 * self._add)

    def succ(self) -> "TowerInt":
        if self._exact is not None:
            return TowerInt(self._exact + 1)
        return TowerInt(exp=self._exp, mul=self._mul, add=self._add + 1)

    def __add__(self, other: int) -> "TowerInt":
        other = int(other)
        if self._exact is not None:
            return TowerInt(self._exact + other)
        return TowerInt(exp=self._exp, mul=self._mul, add=self._add + other)

    def __mul__(self, other: int) -> "TowerInt":
        other = int(other)
        if other < 1:
            raise ValueError("TowerInt only scales by positive integers")
        if self._exact is not None:
            return TowerInt(self._exact * other)
        return TowerInt(exp=self._exp, mul=self._mul * other, add=self._add * other)

    __rmul__ = __mul__

    def tower_view(self) -> tuple[int, int]:
        """(height, base) so that a pure tower equals 2^2^...^base, height times.

        Bases that are large exact powers of two are folded into the height.
        """
        if self._exact is not None:
            return 0, self._exact
        if self._mul != 1 or self._add != 0:
            raise ValueError(f"{self} is not a pure tower")
        h, base = self._exp.tower_view()
        h += 1
        while base > 1 << 64 and base & (base - 1) == 0:
            base = base.bit_length() - 1
            h += 1
        return h, base

    # comparisons
    def _cmp(self, other) -> int:
        return _cmp(self, TowerInt.of(other))

    def __eq__(self, other):
        if not isinstance(other, (int, TowerInt)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self._exact is not None:
            return hash(self._exact)
        return hash((self._exp, self._mul, self._add))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        if self._exact is not None:
            return f"TowerInt({self._exact})" if self._exact < 10**30 else f"TowerInt(<{self._exact.bit_length()} bits>)"
        return f"TowerInt({self})"

    def __str__(self):
        if self._exact is not None:
            return _fmt_big(self._exact)
        if self._mul == 1 and self._add == 0:
            h, base = self.tower_view()
            return "2^" * h + str(base) if h <= 4 else f"tower(h={h}, base={base})"
        core = TowerInt(exp=self._exp)
        s = f"{self._mul}*{core}" if self._mul != 1 else str(core)
        if self._add:
            s += f"{'+' if self._add > 0 else '-'}{abs(self._add)}"
        return s


def _small_diff(x: TowerInt, y: TowerInt, limit: int = 1 << 12) -> Optional[int]:
    """x - y when it is an exact number of modest size, else None."""
    if x.is_exact and y.is_exact:
        d = x.value - y.value
        return d if abs(d) <= limit else None
    if x.is_exact or y.is_exact:
        return None
    if x._mul == y._mul and _cmp(x._exp, y._exp) == 0:
        d = x._add - y._add
        return d if abs(d) <= limit else None
    return None


def _cmp(x: TowerInt, y: TowerInt) -> int:
    if x.is_exact and y.is_exact:
        return (x.value > y.value) - (x.value < y.value)
    if not x.is_exact and y.is_exact:
        return -_cmp(y, x)
    if x.is_exact:
        # exact vs mul*2^E + add with 2^E unmaterializable
        w = x.value
        if _cmp(y._exp, TowerInt(w.bit_length() + 2)) > 0:
            return -1
        big = y._mul * (1 << y._exp.value) + y._add
        return (w > big) - (w < big)
    c = _cmp(x._exp, y._exp)
    if c == 0:
        if x._mul != y._mul:
            return 1 if x._mul > y._mul else -1
        return (x._add > y._add) - (x._add < y._add)
    d = _small_diff(x._exp, y._exp)
    if d is None:
        return c
    # compare mul_x * 2^d with mul_y (common factor 2^min(exp) dropped)
    lhs, rhs = (x._mul << d, y._mul) if d > 0 else (x._mul, y._mul << -d)
    if lhs != rhs:
        return 1 if lhs > rhs else -1
    return (x._add > y._add) - (x._add < y._add)


# -- evaluation ------------------------------------------------------------

_memo: dict = {}
_memo_lock = threading.Lock()


def e_power_eval(f: ArithmeticFunction, m: int, n: int):
    """E^m f (n).  E^0 f is f; otherwise multiply E^(m-1) f over the exponents of n."""
    if m < 0:
        raise ValueError("iteration count must be >= 0")
    if m == 0:
        return f(n)
    if n == 1:
        return 1
    key = (f, m, n)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    val = 1
    for _, a in factorize(n):
        val *= e_power_eval(f, m - 1, a)
        if val == 0:
            break
    if n < 1 << 64:
        with _memo_lock:
            _memo[key] = val
    return val


def apply_E(f: ArithmeticFunction) -> EPower:
    """Ef: multiplicative, prime independent, (Ef)(p^a) = f(a)."""
    if isinstance(f, EPower):
        return EPower(f.base, f.m + 1)
    return EPower(f, 1)


def apply_E_inverse(g: MultiplicativeSpec, size: int = 50) -> ValueTable:
    """The table f(a) = g(p^a), a = 1..size, so that E f == g."""
    if not getattr(g, "multiplicative", False) or not g.prime_independent:
        raise ValueError(f"{g.name} is not multiplicative prime-independent; E^-1 undefined")
    if isinstance(g, EPower) and g.m == 1 and isinstance(g.base, ValueTable) and g.base.size >= size:
        return ValueTable(g.base.values[:size])
    return ValueTable(tuple(g.local(2, a) for a in range(1, size + 1)))


@dataclass(frozen=True)
class ExpConvolution(MultiplicativeSpec):
    """Exponential convolution: (f *e g)(p^n) = sum_{d | n} f(p^d) g(p^(n/d))."""

    f: MultiplicativeSpec
    g: MultiplicativeSpec

    @property
    def prime_independent(self):
        return self.f.prime_independent and self.g.prime_independent

    def local(self, p, n):
        if n == 0:
            return 1
        return sum(self.f.local(p, d) * self.g.local(p, n // d) for d in divisors(n))

    @property
    def name(self):
        return f"({self.f.name}*e{self.g.name})"


def exp_convolve(f: MultiplicativeSpec, g: MultiplicativeSpec) -> ExpConvolution:
    return ExpConvolution(f, g)


# -- supports --------------------------------------------------------------


@dataclass
class SupportProfile:
    spec: ArithmeticFunction
    m: int
    bound: int
    elements: list[int] = field(default_factory=list)


def support_scan(f: ArithmeticFunction, m: int, bound: int, max_bound: int = SUPPORT_SCAN_MAX) -> SupportProfile:
    """All n <= bound with E^m f(n) != 1, by direct evaluation."""
    if bound > max_bound:
        raise OverflowError(f"scan bound {bound} exceeds the configured limit {max_bound}")
    found = [n for n in range(1, bound + 1) if e_power_eval(f, m, n) != 1]
    return SupportProfile(spec=f, m=m, bound=bound, elements=found)


def _base_and_depth(f: ArithmeticFunction) -> tuple[ArithmeticFunction, int]:
    if isinstance(f, EPower):
        return f.base, f.m
    return f, 0


def n_min(f: ArithmeticFunction, limit: int = SCAN_LIMIT) -> TowerInt:
    """min { n : f(n) != 1 }, following E-towers symbolically."""
    base, depth = _base_and_depth(f)
    if depth:
        return tower_min(base, depth)
    if isinstance(base, One):
        raise ValueError("the constant one has empty support")
    size = base.size if isinstance(base, ValueTable) else limit
    for n in range(1, size + 1):
        if base(n) != 1:
            return TowerInt(n)
    raise ValueError(f"{base.name} equals 1 on 1..{size}: empty support")


def second_min(f: ArithmeticFunction, limit: int) -> Optional[int]:
    """min(A(f) minus n(f)) if it is <= limit, else None."""
    first = n_min(f)
    if isinstance(f, ValueTable):
        limit = min(limit, f.size)
    if not first.is_exact or first.value >= limit:
        return None
    for n in range(first.value + 1, limit + 1):
        if f(n) != 1:
            return n
    return None


def tower_min(f: ArithmeticFunction, m: int) -> TowerInt:
    """n(E^m f) via n(E^m f) = 2 ** n(E^(m-1) f)."""
    n = n_min(f)
    for _ in range(m):
        n = n.pow2()
    return n


def oplus(m: int) -> TowerInt:
    """The tower 2, 4, 16, 65536, ... : oplus(0) = 2, oplus(m) = 2 ** oplus(m - 1)."""
    if m < 0:
        raise ValueError("tower index must be >= 0")
    n = TowerInt(2)
    for _ in range(m):
        n = n.pow2()
    return n


def _is_pi_multiplicative(f: ArithmeticFunction) -> bool:
    if isinstance(f, MultiplicativeSpec):
        return bool(f.prime_independent)
    if isinstance(f, ValueTable):
        if f(1) != 1:
            return False
        for n in range(2, f.size + 1):
            want = 1
            for _, a in factorize(n):
                want *= f(1 << a)
            if f(n) != want:
                return False
        return True
    return False


@dataclass
class M0Bound:
    """Result of the lowest-arguments construction.

    ``m0`` counts applications of E to the caller's f; ``shifts`` of them
    are the normalization steps, ``m`` the rest.
    """

    m0: int
    shifts: int
    m: int
    normalize_shift: bool
    spacing_shift: bool
    n: TowerInt


def _three_halves_at_least(n: TowerInt, target: int) -> bool:
    if not n.is_exact:
        return True
    v = n.value
    if v > 4 * max(target, 2).bit_length() * 2:
        return True
    return 3**v >= target * 2**v


def m0_bound(f: ArithmeticFunction, k: int) -> M0Bound:
    """Smallest m with n(E^m f), 3 n(E^m f), ..., (2k-1) n(E^m f) the k lowest of A(E^m f).

    Normalizes first (E once if f is not multiplicative prime-independent
    with n(f) a power of two, once more if n'(f) < 2 n(f)), then takes the
    least m with n(E^m g) >= 2k and (3/2)**n(E^(m-1) g) >= 2k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = f
    n0 = n_min(g)
    normalize = not (_is_pi_multiplicative(g) and n0.is_exact and n0.value & (n0.value - 1) == 0)
    if normalize:
        g = apply_E(g)
    n = n_min(g)
    spacing = second_min(g, 2 * n.value - 1) is not None if n.is_exact else False
    if spacing:
        g = apply_E(g)
        n = n_min(g)
    prev = TowerInt(n.value.bit_length() - 1)  # n(E^-1 g); n(g) is a power of two
    m = 0
    while not (n >= 2 * k and _three_halves_at_least(prev, 2 * k)):
        prev, n = n, n.pow2()
        m += 1
    shifts = int(normalize) + int(spacing)
    return M0Bound(m0=shifts + m, shifts=shifts, m=m, normalize_shift=normalize, spacing_shift=spacing, n=n)


def growth_statistic(values, start: int = 16) -> tuple[float, int]:
    """max over n of log f(n) * log log n / log n, with the argmax."""
    import numpy as np

    v = np.asarray(values, dtype=np.float64)
    n = np.arange(1, len(v) + 1, dtype=np.float64)
    sl = slice(start - 1, None)
    logn = np.log(n[sl])
    stat = np.log(np.maximum(v[sl], 1.0)) * np.log(logn) / logn
    i = int(np.argmax(stat))
    return float(stat[i]), i + start


Number = Union[int, TowerInt]
