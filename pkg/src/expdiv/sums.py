"""Partial sums at desk scale and the Euler-product constants they approach."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .arith import EPower, GaussTau, MultiplicativeSpec, TauK, primes_up_to, sieve_bound, zeta_real
from .bell import ZetaWord, divide_by_word, greedy_factor, local_series
from .eop import e_power_eval
from .util import dumps, write_atomic

BYTES_PER_ENTRY = 40  # values + cofactors + numpy temporaries
DEFAULT_BUDGET = 2 * 10**9


class MemoryBudgetError(MemoryError):
    pass


def default_checkpoints(lo_exp: int = 3, hi_exp: int = 7) -> list[int]:
    """floor(10^(j/2)) for j = 2 lo_exp .. 2 hi_exp: ratio sqrt(10)."""
    return [math.isqrt(10**j) for j in range(2 * lo_exp, 2 * hi_exp + 1)]


# -- sieve ------------------------------------------------------------------


def _local_table(f: MultiplicativeSpec, p: int, amax: int) -> np.ndarray:
    return np.array([f.local(p, a) for a in range(amax + 1)], dtype=np.int64)


def _local_one_vec(f: MultiplicativeSpec, ps: np.ndarray) -> np.ndarray:
    """f(p) for an array of primes p."""
    if f.prime_independent:
        return np.full(ps.shape, f.local(2, 1), dtype=np.int64)
    if isinstance(f, GaussTau):
        return np.where(ps == 2, f.local(2, 1), np.where(ps % 4 == 1, f.local(5, 1), f.local(3, 1))).astype(np.int64)
    return np.array([f.local(int(p), 1) for p in ps], dtype=np.int64)


def sieve_segment(f: MultiplicativeSpec, lo: int, hi: int) -> np.ndarray:
    """f(n) for lo <= n < hi as exact int64 values."""
    if not isinstance(f, MultiplicativeSpec):
        raise TypeError("sieve needs a multiplicative spec")
    if lo < 1 or hi < lo:
        raise ValueError(f"bad range [{lo}, {hi})")
    n = hi - lo
    vals = np.ones(n, dtype=np.int64)
    if n == 0:
        return vals
    rem = np.arange(lo, hi, dtype=np.int64)
    amax = max(1, (hi - 1).bit_length())
    pi_table = _local_table(f, 2, amax) if f.prime_independent else None
    for p in primes_up_to(math.isqrt(hi - 1)):
        p = int(p)
        start = (-lo) % p
        sub = rem[start::p]
        if sub.size == 0:
            continue
        sub = sub // p
        e = np.ones(sub.size, dtype=np.int64)
        mask = sub % p == 0
        while mask.any():
            e[mask] += 1
            sub[mask] //= p
            mask = sub % p == 0
        rem[start::p] = sub
        table = pi_table if pi_table is not None else _local_table(f, p, int(e.max()))
        vals[start::p] *= table[e]
    big = rem > 1
    if big.any():
        loc = _local_one_vec(f, rem[big])
        if not (f.prime_independent and loc.size and loc[0] == 1):
            vals[big] *= loc
    return vals


def sieve_values(
    f: MultiplicativeSpec,
    x_max: int,
    memory_budget: int = DEFAULT_BUDGET,
    segment: Optional[int] = None,
):
    """f(1..x_max).  Returns an array, or a generator of (lo, array) chunks
    when ``segment`` is given."""
    if x_max > sieve_bound():
        raise ValueError(f"x_max {x_max} exceeds the sieve bound {sieve_bound()} (EXPDIV_SIEVE_BOUND)")
    if segment is None:
        if x_max * BYTES_PER_ENTRY > memory_budget:
            raise MemoryBudgetError(
                f"sieving 1..{x_max} needs about {x_max * BYTES_PER_ENTRY // 10**6} MB; "
                f"pass segment=<size> for segmented mode"
            )
        return sieve_segment(f, 1, x_max + 1)
    return ((lo, sieve_segment(f, lo, min(lo + segment, x_max + 1))) for lo in range(1, x_max + 1, segment))


# -- checkpoint sums ----------------------------------------------------------


def spec_hash(f) -> str:
    return hashlib.sha256(repr(f).encode()).hexdigest()[:16]


@dataclass
class CheckpointSums:
    name: str
    checkpoints: list
    sums: list

    def to_dict(self) -> dict:
        return {"function": self.name, "checkpoints": list(self.checkpoints), "sums": [str(s) for s in self.sums]}

    def to_csv(self, mean_a: float = 0.0, mean_b: float = 0.0, scale: Optional[int] = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "sum", "main", "secondary", "delta"])
        for x, s in zip(self.checkpoints, self.sums):
            main = mean_a * x
            sec = mean_b * x ** (1.0 / scale) if scale else 0.0
            w.writerow([x, s, repr(main), repr(sec), repr(s - main - sec)])
        return buf.getvalue()


def _shard_sum(args) -> int:
    f, lo, hi = args
    return int(sieve_segment(f, lo, hi).sum())


def shard_ranges(checkpoints: Sequence[int], shard: int) -> list[tuple[int, int]]:
    """Half-open ranges covering [1, max], split at every checkpoint and every ``shard`` numbers."""
    cuts = set(range(1, checkpoints[-1] + 1, shard)) | {x + 1 for x in checkpoints} | {1}
    cuts = sorted(c for c in cuts if c <= checkpoints[-1] + 1)
    return list(zip(cuts[:-1], cuts[1:]))


def checkpoint_sums(
    f: MultiplicativeSpec,
    checkpoints: Optional[Sequence[int]] = None,
    shard: int = 10**6,
    cache_dir: Optional[str] = None,
    workers: int = 1,
) -> CheckpointSums:
    """Exact sums of f(n) for n <= x at each checkpoint x.

    Shard totals are cached on disk under ``cache_dir`` keyed by the spec
    hash and range, so an interrupted run resumes where it stopped.
    """
    cps = list(default_checkpoints() if checkpoints is None else checkpoints)
    if not cps:
        raise ValueError("no checkpoints")
    if any(b <= a for a, b in zip(cps, cps[1:])) or cps[0] < 1:
        raise ValueError("checkpoints must be positive and strictly increasing")
    if cps[-1] > sieve_bound():
        raise ValueError(f"checkpoint {cps[-1]} exceeds the sieve bound {sieve_bound()}")
    ranges = shard_ranges(cps, shard)
    key = spec_hash(f)
    totals: dict = {}
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        for lo, hi in ranges:
            path = os.path.join(cache_dir, f"{key}-{lo}-{hi}.json")
            if os.path.exists(path):
                with open(path) as fh:
                    totals[(lo, hi)] = int(json.load(fh)["total"])
    todo = [r for r in ranges if r not in totals]
    jobs = [(f, lo, hi) for lo, hi in todo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_shard_sum, jobs))
    else:
        results = [_shard_sum(j) for j in jobs]
    for (lo, hi), t in zip(todo, results):
        totals[(lo, hi)] = t
        if cache_dir:
            path = os.path.join(cache_dir, f"{key}-{lo}-{hi}.json")
            write_atomic(path, dumps({"spec": repr(f), "range": [lo, hi], "total": str(t)}))
    sums, acc, it = [], 0, iter(cps)
    x = next(it)
    for lo, hi in ranges:
        acc += totals[(lo, hi)]
        if hi - 1 == x:
            sums.append(acc)
            x = next(it, None)
    return CheckpointSums(getattr(f, "name", repr(f)), cps, sums)


# -- Euler products -----------------------------------------------------------


def _bell_coeffs(f: MultiplicativeSpec, amax: int) -> list[int]:
    return [int(f.local(2, a)) for a in range(amax + 1)]


@dataclass
class EulerProduct:
    """log of prod_p h_p(p^-s) where h_p is the local series of f divided by the word's."""

    f: MultiplicativeSpec
    word: ZetaWord
    T: int = 120
    small: int = 100
    residual: list = field(init=False)

    def __post_init__(self):
        if not self.f.prime_independent:
            raise ValueError("Euler products here need a prime-independent function")
        res = divide_by_word(local_series(self.f, self.T), self.word)
        self.residual = [Fraction(c) for c in res.to_list()]
        if self.residual[0] != 1:
            raise ValueError("local series must start with 1")
        nz = [j for j in range(1, len(self.residual)) if self.residual[j] != 0]
        self.order = nz[0] if nz else self.T + 1

    def _small_prime(self, p: int, s, dps: int):
        with mpmath.workdps(dps + 10):
            x = mpmath.mpf(p) ** (-mpmath.mpf(s))
            # terms g(a) x^a with g of polynomial growth: stop well below 10^-dps
            amax = int((dps + 15) * math.log(10) / -float(mpmath.log(x))) + 8
            g = _bell_coeffs(self.f, amax)
            S = mpmath.fsum(g[a] * x**a for a in range(amax + 1))
            W = mpmath.mpf(1)
            for a, e in self.word.as_pairs():
                W *= (1 - x ** int(a)) ** e
            return mpmath.log(S * W)

    def log_product(self, s, P: int, dps: int = 20):
        """(sum of log h_p over p <= P, estimated tail beyond P)."""
        s = mpmath.mpf(s)
        if self.order * s <= 1:
            raise ValueError(f"residual order {self.order} too low for convergence at s = {s}")
        primes = primes_up_to(P)
        # below the cutoff the truncated residual series is not accurate enough
        cut = max(self.small, min(10**5, int(10 ** (dps / float(s * self.T))) + 1))
        small = primes[primes < cut]
        large = primes[primes >= cut].astype(np.float64)
        total = mpmath.fsum(self._small_prime(int(p), s, dps) for p in small)
        if large.size:
            x = large ** (-float(s))
            acc = np.zeros_like(x)
            for j in range(len(self.residual) - 1, 0, -1):
                acc = (acc + float(self.residual[j])) * x
            total += math.fsum(np.log1p(acc))
        a = float(self.order * s)
        lead = float(abs(self.residual[self.order])) if self.order < len(self.residual) else 1.0
        tail = lead * float(mpmath.e1((a - 1) * math.log(max(P, 2))))
        return total, tail


def _check_word(word: ZetaWord) -> None:
    pairs = dict((int(a), e) for a, e in word.as_pairs())
    if pairs.get(1) != 1:
        raise ValueError("divergent configuration: the word needs a single zeta(s) factor")


def auto_word(f: MultiplicativeSpec, T: int = 24) -> ZetaWord:
    """Greedy zeta word matching the local series of f through degree T."""
    w, _ = greedy_factor(local_series(f, T), T)
    return w


@dataclass
class EulerConstants:
    name: str
    word: str
    mean_a: float
    mean_a_tail: float
    c_f: Optional[float]
    c_f_tail: Optional[float]
    primes_mean_a: int
    primes_c_f: int

    @property
    def agreement(self) -> Optional[float]:
        return None if self.c_f is None else abs(self.mean_a - self.c_f)

    def to_dict(self) -> dict:
        return {
            "function": self.name,
            "word": self.word,
            "mean_a": repr(self.mean_a),
            "mean_a_tail_estimate": self.mean_a_tail,
            "c_f": None if self.c_f is None else repr(self.c_f),
            "c_f_tail_estimate": self.c_f_tail,
            "agreement": self.agreement,
            "prime_bound_mean_a": self.primes_mean_a,
            "prime_bound_c_f": self.primes_c_f,
        }


def mean_a(f: MultiplicativeSpec, word: Optional[ZetaWord] = None, precision: int = 10, P: Optional[int] = None):
    """Coefficient of x: prod over the word's non-polar factors zeta(a)^e, times H(1)."""
    word = word or auto_word(f)
    _check_word(word)
    ep = EulerProduct(f, word)
    if P is None:
        # tail ~ P^(1 - R): pick P so that it is below 10^-(precision + 2)
        P = int(min(10**6, max(1000, 10 ** ((precision + 2) / max(ep.order - 1, 1)))))
    with mpmath.workdps(precision + 10):
        logh, tail = ep.log_product(1, P, precision + 10)
        z = mpmath.mpf(1)
        for a, e in word.as_pairs():
            if int(a) != 1:
                z *= zeta_real(int(a), precision + 5) ** e
        return float(z * mpmath.exp(logh)), tail, P


def toth_constant(f: MultiplicativeSpec, P: int = 10**7):
    """prod_p (1 + sum_{a>=1} (f(p^a) - f(p^(a-1))) / p^a), with an integral tail estimate."""
    if not f.prime_independent:
        raise ValueError("the product needs a prime-independent function")
    amax = 64
    g = _bell_coeffs(f, amax)
    d = [g[a] - g[a - 1] for a in range(1, amax + 1)]
    nz = [a for a in range(1, amax + 1) if d[a - 1] != 0]
    if not nz:
        return 1.0, 0.0
    ell = nz[0]
    if ell < 2:
        raise ValueError("f(p) != 1: the product does not converge")
    primes = primes_up_to(P).astype(np.float64)
    acc = np.zeros_like(primes)
    inv = 1.0 / primes
    for a in range(amax, 0, -1):
        acc = (acc + d[a - 1]) * inv
    total = math.fsum(np.log1p(acc))
    lnP = math.log(P)
    corr = sum(d[a - 1] * float(mpmath.e1((a - 1) * lnP)) for a in nz[:3])
    val = math.exp(total + corr)
    bound = abs(d[ell - 1]) * float(mpmath.e1((ell - 1) * lnP)) * 0.1 + (
        abs(d[nz[3] - 1]) * float(mpmath.e1((nz[3] - 1) * lnP)) if len(nz) > 3 else 0.0
    )
    return val, bound


def euler_constants(
    f: MultiplicativeSpec,
    word: Optional[ZetaWord] = None,
    precision: int = 10,
    toth_primes: Optional[int] = 10**7,
) -> EulerConstants:
    """Mean value two ways: through the zeta word and through the plain product."""
    word = word or auto_word(f)
    a, tail, P = mean_a(f, word, precision)
    c = ct = None
    if toth_primes:
        c, ct = toth_constant(f, toth_primes)
    return EulerConstants(getattr(f, "name", repr(f)), str(word), a, tail, c, ct, P, toth_primes or 0)


def secondary_constant(f: MultiplicativeSpec, word: Optional[ZetaWord] = None, precision: int = 8, P: int = 10**5):
    """Coefficient B of x^(1/n) where zeta(n s) is the word's second factor.

    Residue of F(s) x^s / s at s = 1/n for a simple pole: zeta(1/n) times the
    remaining factors at 1/n times H(1/n).
    """
    if word is None:
        w0 = auto_word(f)
        n0 = min([int(a) for a, _ in w0.as_pairs() if int(a) > 1], default=1)
        word = auto_word(f, max(24, 4 * n0)) if 4 * n0 > 24 else w0
    _check_word(word)
    pairs = [(int(a), e) for a, e in word.as_pairs()]
    scales = [a for a, _ in pairs if a > 1]
    if not scales:
        return 0.0, 0, 0.0
    n = min(scales)
    e_n = dict(pairs)[n]
    if e_n < 0:
        raise ValueError("no pole at the secondary scale")
    if e_n != 1:
        raise ValueError(f"pole of order {e_n} at s = 1/{n}: the secondary term is a polynomial in log x (unsupported)")
    s = mpmath.mpf(1) / n
    ep = EulerProduct(f, word)
    with mpmath.workdps(precision + 10):
        logh, tail = ep.log_product(s, P, precision + 10)
        z = zeta_real(s, precision + 5)
        for a, e in pairs:
            if a not in (1, n):
                z *= zeta_real(mpmath.mpf(a) / n, precision + 5) ** e
        return float(z * mpmath.exp(logh)), n, tail


# -- fits ---------------------------------------------------------------------


@dataclass
class FitReport:
    name: str
    mean_a: float
    mean_b: float
    scale: Optional[int]
    checkpoints: list
    deltas: list
    slope: Optional[float]
    predicted: Optional[str] = None

    @property
    def max_abs_delta(self) -> float:
        return max(abs(d) for d in self.deltas)

    def to_dict(self) -> dict:
        return {
            "function": self.name,
            "mean_a": repr(self.mean_a),
            "mean_b": repr(self.mean_b),
            "scale": self.scale,
            "checkpoints": self.checkpoints,
            "deltas": [repr(d) for d in self.deltas],
            "max_abs_delta": self.max_abs_delta,
            "slope": self.slope,
            "exact_zero": self.slope is None and self.max_abs_delta == 0,
            "predicted_exponent": self.predicted,
            "note": "empirical slope; desk-scale data cannot certify an analytic exponent",
        }


def fit_error_exponent(
    cs: CheckpointSums,
    mean_a: float,
    mean_b: float = 0.0,
    scale: Optional[int] = None,
    predicted: Optional[str] = None,
) -> FitReport:
    """Residuals after the main and secondary terms, and the log-log slope of |delta|."""
    if len(cs.checkpoints) < 4:
        raise ValueError("a fit needs at least 4 checkpoints")
    xs = np.array(cs.checkpoints, dtype=np.float64)
    if isinstance(mean_a, (int, Fraction)) and isinstance(mean_b, (int, Fraction)) and mean_b == 0:
        deltas = [float(s - Fraction(mean_a) * x) for s, x in zip(cs.sums, cs.checkpoints)]
    else:
        sec = mean_b * xs ** (1.0 / scale) if scale else np.zeros_like(xs)
        deltas = [float(s - mean_a * x - b) for s, x, b in zip(cs.sums, cs.checkpoints, sec)]
    nz = [(x, abs(d)) for x, d in zip(cs.checkpoints, deltas) if d != 0]
    slope = None
    if len(nz) >= 2:
        lx = np.log([x for x, _ in nz])
        ld = np.log([d for _, d in nz])
        slope = float(np.polyfit(lx, ld, 1)[0])
    return FitReport(cs.name, float(mean_a), float(mean_b), scale, list(cs.checkpoints), deltas, slope, predicted)


# -- support structure --------------------------------------------------------


@dataclass
class MinElements:
    m: int
    bound: int
    status: str  # pass | fail | inconclusive
    elements: list
    first_b: Optional[int]
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "bound": self.bound,
            "status": self.status,
            "first_elements": self.elements[:8],
            "count": len(self.elements),
            "first_b_element": self.first_b,
            "detail": self.detail,
        }


def support_elements(m: int, bound: int) -> list[int]:
    """n <= bound with E^m tau(n) != 1, via the sieve."""
    if m == 0:
        vals = sieve_values(TauK(2), bound)
    else:
        vals = sieve_values(EPower(TauK(2), m), bound)
    return (np.nonzero(vals != 1)[0] + 1).tolist()


def verify_min_elements(m: int, bound: int) -> MinElements:
    """Check that the support of E^m tau starts oplus, 3 oplus, 5 oplus and
    consists of odd multiples of oplus up to its first other element."""
    from .eop import oplus

    s = oplus(m)
    if not s.is_exact or bound < 5 * s.value:
        return MinElements(m, bound, "inconclusive", [], None, f"bound must be >= 5*{s}")
    s = s.value
    els = support_elements(m, bound)
    others = [n for n in els if not (n % s == 0 and (n // s) % 2 == 1)]
    first_b = others[0] if others else None
    cut = first_b if first_b is not None else bound + 1
    # below the first other element the support is exactly the odd multiples of s
    ok = els[:3] == [s, 3 * s, 5 * s]
    ok = ok and [n for n in els if n < cut] == list(range(s, cut, 2 * s))
    detail = f"first elements {els[:4]}"
    return MinElements(m, bound, "pass" if ok else "fail", els, first_b, detail)


def e_power_direct(f, m: int, ns) -> list:
    """Direct evaluation oracle used to cross-check the sieve."""
    return [e_power_eval(f, m, int(n)) for n in ns]
