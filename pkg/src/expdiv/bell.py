"""Bell (local) series at a prime and their factorization into zeta words.

A Bell series S(x) = sum f(p^n) x^n is stored truncated at order T with
exact coefficients.  A zeta word prod zeta(a_i s)^e_i contributes the local
factor prod (1 - x^a_i)^(-e_i); dividing S by it leaves the residual whose
first nonzero degree above 0 controls where H(s) converges absolutely.

Note on indexing: the Bell coefficients of E^(m+1) f are the values
E^m f(n), so a word built from the scale n(E^m f) describes E^(m+1) f.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .arith import ArithmeticFunction, MultiplicativeSpec
from .eop import TowerInt, apply_E, m0_bound, n_min, tower_min
from .util import rat_str

Scale = Union[int, TowerInt]


@dataclass(frozen=True)
class LocalSeries:
    """Exact power series c_0 + c_1 x + ... + c_T x^T  (+ O(x^(T+1)))."""

    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    @classmethod
    def one(cls, T: int) -> "LocalSeries":
        return cls((1,) + (0,) * T)

    def truncate(self, T: int) -> "LocalSeries":
        if T > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {T}")
        return LocalSeries(self.coeffs[: T + 1])

    def __mul__(self, other: "LocalSeries") -> "LocalSeries":
        T = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [0] * (T + 1)
        for i in range(T + 1):
            if a[i]:
                ai = a[i]
                for j in range(T + 1 - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return LocalSeries(tuple(out))

    def inverse(self) -> "LocalSeries":
        c = self.coeffs
        if c[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not a unit")
        inv0 = Fraction(1, 1) / c[0] if c[0] not in (1, -1) else c[0]
        out = [inv0] + [0] * self.order
        for n in range(1, self.order + 1):
            acc = sum(c[k] * out[n - k] for k in range(1, n + 1) if c[k])
            out[n] = -acc * inv0
        return LocalSeries(tuple(_norm(x) for x in out))

    def __truediv__(self, other: "LocalSeries") -> "LocalSeries":
        return self * other.inverse()

    def times_binomial(self, scale: int, power: int) -> "LocalSeries":
        """Multiply by (1 - x^scale)^power for an integer power, exactly."""
        c = list(self.coeffs)
        T = len(c) - 1
        if scale > T or power == 0:
            return self
        if power > 0:
            for _ in range(power):
                for j in range(T, scale - 1, -1):
                    c[j] -= c[j - scale]
        else:
            for _ in range(-power):
                for j in range(scale, T + 1):
                    c[j] += c[j - scale]
        return LocalSeries(tuple(c))

    def first_nonzero_above(self, start: int = 1) -> Optional[int]:
        for d in range(start, self.order + 1):
            if self.coeffs[d] != 0:
                return d
        return None

    def to_list(self) -> list[str]:
        return [rat_str(x) for x in self.coeffs]


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass(frozen=True)
class ZetaWord:
    """prod zeta(scale * s)^exponent, sorted by scale."""

    factors: tuple = ()
    claimed_order: Optional[Scale] = None
    label: str = ""

    def __post_init__(self):
        scales = [s for s, _ in self.factors]
        if any(e == 0 for _, e in self.factors):
            raise ValueError("zero exponents are not allowed in a zeta word")
        if len(set(map(_scale_key, scales))) != len(scales):
            raise ValueError(f"repeated scale in {self.factors}")
        ordered = tuple(sorted(self.factors, key=lambda t: TowerInt.of(t[0])))
        object.__setattr__(self, "factors", ordered)

    @classmethod
    def of(cls, pairs: Sequence, claimed_order=None, label="") -> "ZetaWord":
        merged: dict = {}
        for s, e in pairs:
            key = _scale_key(s)
            prev = merged.get(key, (s, 0))
            merged[key] = (s, prev[1] + int(e))
        return cls(tuple(v for v in merged.values() if v[1] != 0), claimed_order, label)

    @classmethod
    def parse(cls, text: str, **kw) -> "ZetaWord":
        """Parse ``"1:1,16:1,17:-1"``."""
        pairs = []
        for chunk in text.replace(" ", "").split(","):
            if not chunk:
                continue
            try:
                s, e = chunk.split(":")
                pairs.append((int(s), int(e)))
            except ValueError as exc:
                raise ValueError(f"bad zeta word chunk {chunk!r}; expected scale:exponent") from exc
        return cls.of(pairs, **kw)

    def as_pairs(self) -> list[tuple]:
        return [(s.value if isinstance(s, TowerInt) and s.is_exact else s, e) for s, e in self.factors]

    def __str__(self):
        num, den = [], []
        for s, e in self.factors:
            sc = str(TowerInt.of(s))
            if any(op in sc for op in "+-*"):
                sc = f"({sc})"
            arg = "s" if s == 1 else f"{sc}s"
            term = f"zeta({arg})" + (f"^{abs(e)}" if abs(e) != 1 else "")
            (num if e > 0 else den).append(term)
        text = " ".join(num) or "1"
        return text + (" / " + " ".join(den) if den else "")

    def to_dict(self) -> dict:
        return {
            "factors": [[str(TowerInt.of(s)), e] for s, e in self.factors],
            "claimed_order": None if self.claimed_order is None else str(TowerInt.of(self.claimed_order)),
            "label": self.label,
            "text": str(self),
        }


def _scale_key(s):
    t = TowerInt.of(s)
    return t.value if t.is_exact else str(t)


# -- operations ------------------------------------------------------------


def local_series(f: ArithmeticFunction, T: int, p: Union[int, str] = "generic") -> LocalSeries:
    """Coefficients f(p^n), n = 0..T."""
    if not isinstance(f, MultiplicativeSpec):
        raise TypeError(f"{f.name} is not a multiplicative descriptor")
    if p == "generic":
        if not f.prime_independent:
            raise ValueError(f"{f.name} depends on p; pass an explicit prime")
        p = 2
    return LocalSeries(tuple([1] + [f.local(p, n) for n in range(1, T + 1)]))


def word_local_factor(w: ZetaWord, T: int) -> LocalSeries:
    """Truncated expansion of prod (1 - x^a)^(-e); scales above T drop out."""
    s = LocalSeries.one(T)
    for scale, e in w.factors:
        if TowerInt.of(scale) > T:
            continue
        s = s.times_binomial(int(scale), -e)
    return s


def divide_by_word(S: LocalSeries, w: ZetaWord) -> LocalSeries:
    r = S
    for scale, e in w.factors:
        if TowerInt.of(scale) > S.order:
            continue
        r = r.times_binomial(int(scale), e)
    return r


def greedy_factor(S: LocalSeries, T: Optional[int] = None) -> tuple[ZetaWord, LocalSeries]:
    """Peel off (1 - x^d)^(c_d) at the lowest nonzero degree d until 1 + O(x^(T+1))."""
    if S[0] != 1:
        raise ValueError("greedy factorization needs constant term 1")
    T = S.order if T is None else T
    r = S.truncate(T)
    pairs = []
    d = r.first_nonzero_above(1)
    while d is not None:
        c = r[d]
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise ValueError(f"non-integral coefficient {c} at degree {d}; zeta words need integer exponents")
            c = int(c)
        r = r.times_binomial(d, c)
        pairs.append((d, c))
        d = r.first_nonzero_above(d + 1)
    return ZetaWord(tuple(pairs), claimed_order=T + 1, label="greedy"), r


@dataclass
class VerifyResult:
    passed: bool
    claimed_order: int
    checked_to: int
    first_bad_degree: Optional[int] = None
    bad_value: Optional[Fraction] = None
    next_nonzero_degree: Optional[int] = None
    residual: LocalSeries = field(default=None, repr=False)
    word: Optional[ZetaWord] = None
    function: str = ""

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "word": None if self.word is None else self.word.to_dict(),
            "passed": self.passed,
            "claimed_order": self.claimed_order,
            "verified_order": self.first_bad_degree if self.first_bad_degree is not None else self.claimed_order,
            "first_bad_degree": self.first_bad_degree,
            "bad_value": None if self.bad_value is None else rat_str(self.bad_value),
            "next_nonzero_degree": self.next_nonzero_degree,
            "residual": None if self.residual is None else self.residual.to_list(),
        }


def verify_expansion(
    f: MultiplicativeSpec,
    w: ZetaWord,
    T: Optional[int] = None,
    claimed: Optional[int] = None,
    p: Union[int, str] = "generic",
) -> VerifyResult:
    """Check local_series(f) / word == 1 + O(x^claimed).

    The residual is computed to order T (default claimed) so the first
    nonzero degree beyond the claim is reported too.
    """
    if claimed is None:
        if w.claimed_order is None:
            raise ValueError("no residual order claimed")
        claimed = int(w.claimed_order)
    T = claimed if T is None else max(T, claimed - 1)
    S = local_series(f, T, p)
    r = divide_by_word(S, w)
    bad = r.first_nonzero_above(1)
    ok = bad is None or bad >= claimed
    return VerifyResult(
        passed=ok,
        claimed_order=claimed,
        checked_to=T,
        first_bad_degree=None if ok else bad,
        bad_value=None if ok else Fraction(r[bad]),
        next_nonzero_degree=bad,
        residual=r,
        word=w,
        function=f.name,
    )


# -- closed-form words -----------------------------------------------------


def tau_power_word(n: Scale) -> ZetaWord:
    """zeta(s) zeta(ns) zeta((2n+1)s) zeta(3ns) / (zeta((n+1)s) zeta(2ns)).

    With n = n(E^m tau), m >= 2, this is the Bell factor of E^(m+1) tau up to
    O(x^(3n+1)).
    """
    n = TowerInt.of(n)
    pairs = [(1, 1), (n, 1), (n.succ(), -1), (n.double(), -1), (n.double().succ(), 1), (n * 3, 1)]
    return ZetaWord.of([(_plain(s), e) for s, e in pairs], claimed_order=_plain(n * 3 + 1), label=f"tau-tower n={n}")


def tau_k_power_word(n: Scale, k: int) -> ZetaWord:
    """zeta(s) zeta^(k-1)(ns) / (zeta^(k-1)((n+1)s) zeta^(k(k-1)/2)(2ns)), residual order 2n+1."""
    if k < 2:
        raise ValueError("k must be >= 2")
    n = TowerInt.of(n)
    pairs = [(1, 1), (n, k - 1), (n.succ(), -(k - 1)), (n.double(), -(k * (k - 1) // 2))]
    return ZetaWord.of(
        [(_plain(s), e) for s, e in pairs], claimed_order=_plain(n.double().succ()), label=f"tau{k}-tower n={n}"
    )


def exp_tau_k_word(k: int, ell: int = 2) -> ZetaWord:
    """zeta(s) zeta^(k-1)(ell s): the E tau_k shape.

    At ell = 2 the residual starts at degree 5; for other ell only ell + 1
    is guaranteed.
    """
    claimed = 5 if ell == 2 else ell + 1
    return ZetaWord.of([(1, 1), (ell, k - 1)], claimed_order=claimed, label=f"exp tau{k}")


def gauss_exp_word() -> ZetaWord:
    """zeta(s) zeta^2(2s) / zeta(3s): Bell factor of E applied to the Gaussian divisor count."""
    return ZetaWord.of([(1, 1), (2, 2), (3, -1)], claimed_order=5, label="exp gauss")


def general_word(f: ArithmeticFunction, m: int) -> ZetaWord:
    """zeta(s) (zeta(ns) / zeta((n+1)s))^(f(n(f)) - 1) with n = n(E^m f).

    Describes E^(m+1) f up to O(x^(2n)) once m >= m0(f, 2).
    """
    need = m0_bound(f, 2).m0
    if m < need:
        raise ValueError(f"m = {m} is below m0(f, 2) = {need}")
    n0 = n_min(f)
    lead = f(n0.value)
    lead_frac = Fraction(lead)
    if lead_frac.denominator != 1:
        raise ValueError(f"f(n(f)) = {lead} is not an integer")
    e = int(lead_frac) - 1
    n = tower_min(f, m)
    return ZetaWord.of(
        [(1, 1), (_plain(n), e), (_plain(n.succ()), -e)], claimed_order=_plain(n.double()), label=f"general m={m}"
    )


def general_word_target(f: ArithmeticFunction, m: int) -> MultiplicativeSpec:
    g = f
    for _ in range(m + 1):
        g = apply_E(g)
    return g


def _plain(x):
    if isinstance(x, TowerInt):
        return x.value if x.is_exact else x
    return x
