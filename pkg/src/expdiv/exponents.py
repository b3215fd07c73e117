"""Error-term exponents: a small knowledge base of theta bounds and the
formulas that turn them into asymptotic exponents.

Every figure carries a provenance string and an RH flag; anything computed
from an RH-conditional input inherits the flag.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional, Union

from .eop import TowerInt, oplus
from .util import rat_str, short_rat

F = Fraction

PROVENANCES = ("paper-constant", "pair-derived", "formula", "external-reference")

EULER_GAMMA = "0.57721566490153286060651209008240243104215933593992"


@dataclass(frozen=True)
class Target:
    kind: str  # Dim, OneM, OneMM
    arg: int

    _RE = re.compile(r"^\s*(Dim|OneM|OneMM)\((\d+)\)\s*$")

    @classmethod
    def parse(cls, text: str) -> "Target":
        m = cls._RE.match(text)
        if not m:
            raise ValueError(f"bad theta target {text!r}; use Dim(k), OneM(m) or OneMM(m)")
        return cls(m.group(1), int(m.group(2)))

    def describe(self) -> str:
        a = str(TowerInt.of(self.arg))
        if self.kind == "Dim":
            return f"theta_{a}"
        if self.kind == "OneM":
            return f"theta(1,{a})"
        return f"theta(1,{a},{a})"

    def __str__(self):
        return f"{self.kind}({TowerInt.of(self.arg)})"


@dataclass(frozen=True)
class ThetaBound:
    target: Target
    value: Fraction
    epsilon: bool = False
    rh_conditional: bool = False
    provenance: str = "paper-constant"
    word: Optional[str] = None
    source: str = ""
    discrepancy: Optional[str] = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "value", F(self.value))

    def to_dict(self) -> dict:
        d = {
            "target": str(self.target),
            "name": self.target.describe(),
            "value": rat_str(self.value),
            "approx": float(self.value),
            "epsilon": self.epsilon,
            "rh_conditional": self.rh_conditional,
            "provenance": self.provenance,
            "source": self.source,
        }
        if self.word:
            d["word"] = self.word
        if self.discrepancy:
            d["discrepancy"] = self.discrepancy
        return d


class ThetaKB:
    """Immutable store of theta bounds; closed formulas fill the gaps."""

    def __init__(self, records: list[ThetaBound]):
        self._records = {r.target: r for r in records}

    @classmethod
    def load(cls, path: Optional[str] = None) -> "ThetaKB":
        if path is None:
            text = resources.files("expdiv").joinpath("data/theta_kb.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        raw = json.loads(text)
        recs = [
            ThetaBound(
                target=Target.parse(r["target"]),
                value=F(r["value"]),
                epsilon=r.get("epsilon", False),
                rh_conditional=r.get("rh_conditional", False),
                provenance=r["provenance"],
                word=r.get("word"),
                source=r.get("source", ""),
                discrepancy=r.get("discrepancy"),
            )
            for r in raw["records"]
        ]
        return cls(recs)

    def stored(self) -> list[ThetaBound]:
        return sorted(self._records.values(), key=lambda r: (r.target.kind, r.target.arg))

    def get(self, target: Union[Target, str]) -> Optional[ThetaBound]:
        if isinstance(target, str):
            target = Target.parse(target)
        if target in self._records:
            return self._records[target]
        if target.kind == "Dim" and target.arg >= 4:
            k = target.arg
            return ThetaBound(target, F(k - 1, k + 2), epsilon=True, provenance="formula", source="(k-1)/(k+2), k >= 4")
        if target.kind in ("OneM", "OneMM"):
            r = _log2_exact(target.arg)
            lo = 5 if target.kind == "OneM" else 10
            if r is not None and r >= lo:
                from .expairs import theta_closed

                variant = "2d" if target.kind == "OneM" else "3d"
                return ThetaBound(
                    target,
                    theta_closed(r, variant),
                    provenance="formula",
                    word=str(_closed_word(r, variant)),
                    source=f"closed form at r = {r}",
                )
        return None

    def rederive(self, bound: ThetaBound) -> Fraction:
        """Recompute a pair-derived or formula bound through ``expairs``."""
        from .expairs import eval_word, theta_second_case

        if bound.word is None or bound.target.kind != "OneM":
            raise ValueError(f"{bound.target} has no re-derivable witness")
        return theta_second_case(eval_word(bound.word), bound.target.arg)


def _closed_word(r, variant):
    from .expairs import closed_form_word

    return closed_form_word(r, variant)


def _log2_exact(n: int) -> Optional[int]:
    return n.bit_length() - 1 if n > 0 and n & (n - 1) == 0 else None


_KB: Optional[ThetaKB] = None


def default_kb() -> ThetaKB:
    global _KB
    if _KB is None:
        _KB = ThetaKB.load()
    return _KB


def theta_k_bound(k: int) -> ThetaBound:
    """Best listed bound for theta_k (theta_1 = 0)."""
    if k < 1:
        raise ValueError("theta_k needs k >= 1")
    return default_kb().get(Target("Dim", k))


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class SymbolicExponent:
    """An exponent whose scale is too large to write down as a fraction."""

    text: str

    def __str__(self):
        return self.text


Scale = Union[int, TowerInt]


def _materialize(ell: Scale) -> Optional[int]:
    if isinstance(ell, TowerInt):
        return ell.value if ell.is_exact else None
    return int(ell)


def u_general(k: int, ell: Scale) -> Union[Fraction, SymbolicExponent]:
    """u_{k,l} = 1 / (l + 1 - theta_{k-1})."""
    if k < 2:
        raise ValueError("u_{k,l} needs k >= 2")
    th = theta_k_bound(k - 1).value
    n = _materialize(ell)
    if n is None:
        return SymbolicExponent(f"1/({ell}+1-{rat_str(th)})")
    if n < 2:
        raise ValueError("u_{k,l} needs l >= 2")
    return 1 / (n + 1 - th)


def toth_w(k: int) -> Fraction:
    """(2k - 1)/(4k + 1), the earlier exponent for E tau_k."""
    return F(2 * k - 1, 4 * k + 1)


def u_upper_bounds(k: int, ell: int) -> tuple[Fraction, Fraction]:
    """((k+1)/(3+(k+1)l), (2k-1)/(3+(2k-1)l)): upper bounds for u_{k,l} when k >= 5."""
    return F(k + 1, 3 + (k + 1) * ell), F(2 * k - 1, 3 + (2 * k - 1) * ell)


@dataclass(frozen=True)
class Exponent:
    value: Union[Fraction, SymbolicExponent]
    epsilon: bool = False
    rh_conditional: bool = False
    provenance: tuple = ()

    def to_dict(self) -> dict:
        v = self.value
        return {
            "value": rat_str(v) if isinstance(v, Fraction) else str(v),
            "approx": float(v) if isinstance(v, Fraction) else None,
            "epsilon": self.epsilon,
            "rh_conditional": self.rh_conditional,
            "provenance": list(self.provenance),
        }


def beta_nowak(a: int, b: int, c: int, theta: Union[ThetaBound, Fraction, int, str]) -> Exponent:
    """(1 - a t)/(a + c - 2 a c t) for zeta(as) zeta^r(bs)/zeta^k(cs), assuming RH."""
    if not (1 <= a <= b < c < 2 * (a + b)):
        raise ValueError(f"need a <= b < c < 2(a+b), got (a, b, c) = ({a}, {b}, {c})")
    if isinstance(theta, ThetaBound):
        t, prov = theta.value, (f"{theta.target.describe()} [{theta.provenance}]",)
    else:
        t, prov = F(theta), (f"theta = {rat_str(F(theta))} [given]",)
    if not t < F(1, c):
        raise ValueError(f"need theta < 1/c, got theta = {rat_str(t)}, c = {c}")
    beta = (1 - a * t) / (a + c - 2 * a * c * t)
    return Exponent(beta, epsilon=True, rh_conditional=True, provenance=prov + ("beta under RH",))


_FAMILY_RE = re.compile(r"^\s*(Emtau|Etauk|Emtauk)\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$")


def omega_exponent(family: str, m: Optional[int] = None, k: Optional[int] = None) -> Union[Fraction, SymbolicExponent]:
    """Omega exponents: Emtau(m), Etauk(k), Emtauk(m, k); m indexes the tower scale."""
    mt = _FAMILY_RE.match(family)
    if mt:
        family = mt.group(1)
        args = [int(mt.group(2))] + ([int(mt.group(3))] if mt.group(3) else [])
        if family == "Emtau":
            (m,) = args
        elif family == "Etauk":
            (k,) = args
        elif len(args) == 2:
            m, k = args
        else:
            raise ValueError("Emtauk needs (m, k)")
    if family == "Emtau":
        if m is None or m <= 1:
            raise ValueError("Emtau needs m > 1")
        s = _materialize(oplus(m))
        return SymbolicExponent(f"1/(2({oplus(m)}+1))") if s is None else F(1, 2 * (s + 1))
    if family == "Etauk":
        if k is None or k <= 1:
            raise ValueError("Etauk needs k > 1")
        return 1 / (4 - F(2, k))
    if family == "Emtauk":
        if m is None or m <= 1 or k is None or k <= 1:
            raise ValueError("Emtauk needs m > 1 and k > 1")
        s = _materialize(oplus(m))
        if s is None:
            return SymbolicExponent(f"{k - 1}/(2(1+{k - 1}*{oplus(m)}))" if k > 2 else f"1/(2({oplus(m)}+1))")
        return F(k - 1, 2 * (1 + s * (k - 1)))
    raise ValueError(f"unknown family {family!r}")


def moment_exponents(r: int) -> tuple[Fraction, Fraction]:
    """(u_r, t_r) for the r-th moments of tau^(e) and phi^(e)."""
    if r < 1:
        raise ValueError("moment order must be >= 1")
    t = 2**r
    return F(t + 1, 2 * t + 5), F(t + 1, 3 * (t + 2))


# -- reports ----------------------------------------------------------------


@dataclass
class ExponentReport:
    m: int
    k: int
    rh: bool
    function: str
    scale: str
    main_term: str
    error: Exponent
    rh_error: Optional[Exponent]
    omega: Exponent
    notes: list = field(default_factory=list)

    @property
    def best_error(self) -> Exponent:
        if self.rh and self.rh_error is not None and isinstance(self.error.value, Fraction):
            if self.rh_error.value < self.error.value:
                return self.rh_error
        return self.error

    def to_dict(self) -> dict:
        return {
            "inputs": {"m": self.m, "k": self.k, "rh": self.rh},
            "function": self.function,
            "scale": self.scale,
            "main_term": self.main_term,
            "error_exponent": self.error.to_dict(),
            "rh_error_exponent": None if self.rh_error is None else self.rh_error.to_dict(),
            "best_error_exponent": self.best_error.to_dict(),
            "omega_exponent": self.omega.to_dict(),
            "notes": list(self.notes),
        }

    def render_text(self) -> str:
        rows = [
            ("function", self.function),
            ("scale", self.scale),
            ("main term", self.main_term),
            ("error", _fmt_exp(self.error)),
            ("error (RH)", "-" if self.rh_error is None else _fmt_exp(self.rh_error)),
            ("best", _fmt_exp(self.best_error)),
            ("Omega", _fmt_exp(self.omega)),
        ]
        w = max(len(a) for a, _ in rows)
        lines = [f"{a.ljust(w)}  {b}" for a, b in rows]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _fmt_exp(e: Exponent) -> str:
    v = short_rat(e.value) if isinstance(e.value, Fraction) else str(e.value)
    flags = (" +eps" if e.epsilon else "") + (" [RH]" if e.rh_conditional else "")
    return f"x^({v}){flags}  <- {'; '.join(e.provenance)}"


def report(m: int, k: int, rh: bool = False, kb: Optional[ThetaKB] = None) -> ExponentReport:
    """Exponents for the k-fold divisor tower whose zeta factor sits at scale oplus(m).

    The Dirichlet series of E^(m+1) tau_k has local coefficients
    E^m tau_k(a), which first differ from 1 at a = oplus(m); so the scale
    oplus(m) belongs to E^(m+1) tau_k.  m = 0 is the E tau_k family.
    """
    if m < 0 or k < 2:
        raise ValueError("report needs m >= 0 and k >= 2")
    kb = kb or default_kb()
    sc = oplus(m)
    s = _materialize(sc)
    fn = f"E^{m + 1} tau" + (f"_{k}" if k > 2 else "")
    notes = []
    if k == 2:
        main = f"A x + B x^(1/{sc})"
    elif k == 3:
        main = f"K x + (r1 log x + r0) x^(1/{sc})"
    else:
        main = f"K x + x^(1/{sc}) R_{k - 2}(log x)"

    if m == 0:
        err = Exponent(u_general(k, 2), epsilon=k > 2, provenance=(f"1/(3 - theta_{k - 1})", f"theta_{k - 1} [{theta_k_bound(k - 1).provenance}]"))
        omega = Exponent(omega_exponent("Etauk", k=k), provenance=("k/(2(1+2(k-1)))",))
    else:
        if k <= 3:
            val = SymbolicExponent(f"1/({sc}+1)") if s is None else F(1, s + 1)
            err = Exponent(val, provenance=("1/(oplus+1) from theta(1,oplus)",) if k == 2 else ("1/(oplus+1) from theta(1,oplus,oplus)",))
        else:
            th = theta_k_bound(k - 1)
            err = Exponent(u_general(k, sc), epsilon=True, provenance=(f"1/(oplus+1-theta_{k - 1})", f"theta_{k - 1} [{th.provenance}]"))
        omega_v = omega_exponent("Emtauk", m=m, k=k) if m >= 2 else (F(k - 1, 2 * (1 + s * (k - 1))))
        omega = Exponent(omega_v, provenance=("(k-1)/(2(1+oplus(k-1)))",))
        if m == 1:
            notes.append("scale 4: the tower bounds are only claimed for larger towers; figures shown by the same formulas")

    rh_err = None
    if m >= 1 and k in (2, 3) and s is not None:
        tgt = Target("OneM" if k == 2 else "OneMM", s)
        th = kb.get(tgt)
        if th is None:
            notes.append(f"no {tgt.describe()} in the knowledge base; RH exponent unavailable")
        else:
            try:
                rh_err = beta_nowak(1, s, s + 1, th)
            except ValueError as exc:
                notes.append(f"RH exponent not applicable: {exc}")
            if th.discrepancy:
                notes.append(f"{tgt.describe()}: {th.discrepancy}")
    elif m >= 1 and k > 3:
        notes.append("no RH refinement is known for k > 3")
    return ExponentReport(m, k, rh, fn, str(sc), main, err, rh_err, omega, notes)


def theta_table(kb: Optional[ThetaKB] = None, extra_r: tuple = (5, 6, 7, 8)) -> list[dict]:
    """Stored records plus a few closed-form rows, with re-derivation checks."""
    kb = kb or default_kb()
    rows = []
    for rec in kb.stored():
        d = rec.to_dict()
        if rec.provenance == "pair-derived":
            d["rederived"] = rat_str(kb.rederive(rec))
            d["rederived_matches"] = kb.rederive(rec) == rec.value
        rows.append(d)
    for r in extra_r:
        rows.append(kb.get(Target("OneM", 2**r)).to_dict())
    return rows


def render_table(rows: list[dict]) -> str:
    cols = ["name", "value", "approx", "provenance", "word"]
    body = [[str(r.get(c, "") if r.get(c) is not None else "") if c != "approx" else f"{r['approx']:.6f}" for c in cols] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) for i, c in enumerate(cols)]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    out.append("  ".join("-" * w for w in widths))
    out += ["  ".join(v.ljust(w) for v, w in zip(b, widths)).rstrip() for b in body]
    return "\n".join(out) + "\n"


CONSTANTS = {
    "euler_gamma": EULER_GAMMA,
}
