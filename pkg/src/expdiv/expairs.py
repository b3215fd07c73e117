"""Exponent pairs under van der Corput's A and B processes, done exactly.

Pairs live in the projective plane as (k : l : 1); A and B act by 3x3
integer matrices, so words of processes are matrix products and every
value stays a ``Fraction``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

F = Fraction

A_MAT = ((1, 0, 0), (1, 1, 1), (2, 0, 2))
B_MAT = ((0, 2, -1), (2, 0, 1), (0, 0, 2))
# A = S J S^-1 with J the Jordan form diag-block [[1,1,0],[0,1,0],[0,0,2]]
S_MAT = ((0, -1, 0), (1, 0, 1), (0, 2, 1))


class FirstCaseRegime(ValueError):
    """The pair does not satisfy 2l - 2mk - 1 <= 0; its theta needs the first-case formula."""


@dataclass(frozen=True)
class ExponentPair:
    k: Fraction
    l: Fraction
    epsilon: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k", F(self.k))
        object.__setattr__(self, "l", F(self.l))

    def in_region(self) -> bool:
        return 0 <= self.k <= F(1, 2) <= self.l <= 1

    def __str__(self):
        eps = "+eps" if self.epsilon else ""
        return f"({_r(self.k)}{eps}, {_r(self.l)}{eps})"

    def to_dict(self) -> dict:
        return {"k": _r(self.k), "l": _r(self.l), "epsilon": self.epsilon}


def _r(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


SEEDS = {
    "I": ExponentPair(F(0), F(1)),
    "H05": ExponentPair(F(32, 205), F(269, 410), epsilon=True),
    "H87": ExponentPair(F(2, 13), F(35, 52), epsilon=True),
}


# -- projective arithmetic -------------------------------------------------


def mat_mul(X, Y):
    return tuple(tuple(sum(X[i][t] * Y[t][j] for t in range(3)) for j in range(3)) for i in range(3))


def mat_vec(X, v):
    return tuple(sum(X[i][t] * v[t] for t in range(3)) for i in range(3))


def mat_pow(X, n: int):
    out = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    for _ in range(n):
        out = mat_mul(out, X)
    return out


def mat_inv(X):
    a, b, c = X[0]
    d, e, f = X[1]
    g, h, i = X[2]
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    adj = (
        (e * i - f * h, c * h - b * i, b * f - c * e),
        (f * g - d * i, a * i - c * g, c * d - a * f),
        (d * h - e * g, b * g - a * h, a * e - b * d),
    )
    return tuple(tuple(F(x, det) for x in row) for row in adj)


def a_power_eigen(n: int):
    """A^n through the Jordan decomposition A = S J S^-1."""
    Jn = ((1, n, 0), (0, 1, 0), (0, 0, 2**n))
    return mat_mul(mat_mul(S_MAT, Jn), mat_inv(S_MAT))


@dataclass(frozen=True)
class ProjectivePoint:
    coords: tuple

    @classmethod
    def of(cls, pair: ExponentPair) -> "ProjectivePoint":
        return cls((pair.k, pair.l, F(1)))

    def scaled(self, c) -> "ProjectivePoint":
        if c == 0:
            raise ValueError("projective points cannot be scaled by zero")
        return ProjectivePoint(tuple(F(c) * x for x in self.coords))

    def to_pair(self, epsilon: bool = False) -> ExponentPair:
        x, y, z = self.coords
        if z == 0:
            raise ZeroDivisionError("point at infinity has no affine pair")
        return ExponentPair(F(x) / z, F(y) / z, epsilon)

    def same_as(self, other: "ProjectivePoint") -> bool:
        a, b = self.coords, other.coords
        return all(a[i] * b[j] == a[j] * b[i] for i in range(3) for j in range(3))


def apply_process(step: str, pair: ExponentPair) -> ExponentPair:
    """A(k, l) = (k/(2k+2), (k+l+1)/(2k+2));  B(k, l) = (l - 1/2, k + 1/2)."""
    if step == "A":
        M = A_MAT
    elif step == "B":
        M = B_MAT
    else:
        raise ValueError(f"unknown process {step!r}")
    x, y, z = mat_vec(M, (pair.k, pair.l, 1))
    return ExponentPair(F(x) / z, F(y) / z, pair.epsilon)


# -- words -----------------------------------------------------------------


@dataclass(frozen=True)
class ProcessWord:
    """Letters over {A, B} written left to right, applied right to left to ``seed``."""

    steps: str
    seed: Union[str, ExponentPair] = "I"

    def seed_pair(self) -> ExponentPair:
        if isinstance(self.seed, ExponentPair):
            return self.seed
        try:
            return SEEDS[self.seed]
        except KeyError:
            raise ValueError(f"unknown seed {self.seed!r}; known: {sorted(SEEDS)}") from None

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        seed = self.seed if isinstance(self.seed, str) else f"({_r(self.seed.k)},{_r(self.seed.l)})"
        return (compress(self.steps) + " " + seed).strip()


def compress(steps: str) -> str:
    """'AAABAAB' -> 'A^3BA^2B'."""
    out = []
    for m in re.finditer(r"A+|B+", steps):
        run = m.group(0)
        out.append(run[0] + (f"^{len(run)}" if len(run) > 1 else ""))
    return "".join(out)


_TOKEN = re.compile(r"\s*(H05|H87|I|A|B|\^\s*\d+|\(|\)|,|[+-]?\d+(?:/\d+)?)")


def parse_word(text: str) -> ProcessWord:
    """Parse e.g. ``"A^3 B A^2 B A^4 B I"``, ``"(AB)^4(A^3BA)^5A H87"``, ``"B (1/6,2/3)"``."""
    cleaned = text.replace("·", "").replace("*", "").strip()
    tokens, pos = [], 0
    while pos < len(cleaned):
        m = _TOKEN.match(cleaned, pos)
        if not m or m.end() == pos:
            rest = cleaned[pos:].strip()
            if not rest:
                break
            raise ValueError(f"cannot parse process word at {rest!r}")
        tokens.append(m.group(1).replace(" ", ""))
        pos = m.end()
    # explicit seed "(k,l)" at the end
    seed: Union[str, ExponentPair] = "I"
    if len(tokens) >= 5 and tokens[-1] == ")" and tokens[-3] == ",":
        seed = ExponentPair(F(tokens[-4]), F(tokens[-2]))
        tokens = tokens[:-5]
    elif tokens and tokens[-1] in SEEDS:
        seed = tokens.pop()
    steps, i = _parse_seq(tokens, 0)
    if i != len(tokens):
        raise ValueError(f"unexpected token {tokens[i]!r} in {text!r}")
    return ProcessWord(steps, seed)


def _parse_seq(tokens, i):
    out = []
    while i < len(tokens) and tokens[i] != ")":
        tok = tokens[i]
        if tok in ("A", "B"):
            unit, i = tok, i + 1
        elif tok == "(":
            unit, i = _parse_seq(tokens, i + 1)
            if i >= len(tokens) or tokens[i] != ")":
                raise ValueError("unbalanced parentheses in process word")
            i += 1
        else:
            raise ValueError(f"unexpected token {tok!r}; seeds must come last")
        if i < len(tokens) and tokens[i].startswith("^"):
            unit *= int(tokens[i][1:])
            i += 1
        out.append(unit)
    return "".join(out), i


def eval_word(word: Union[ProcessWord, str]) -> ExponentPair:
    """Fold the processes right to left over the seed."""
    if isinstance(word, str):
        word = parse_word(word)
    pair = word.seed_pair()
    for step in reversed(word.steps):
        pair = apply_process(step, pair)
    return pair


def word_matrix(steps: str):
    M = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    for ch in steps:
        M = mat_mul(M, A_MAT if ch == "A" else B_MAT)
    return M


# -- closed forms ----------------------------------------------------------


def closed_form_word(r: int, variant: str = "2d") -> ProcessWord:
    if variant == "2d":
        return ProcessWord("A" * (r - 1) + "B" + "A" * (r - 3) + "BAB", "I")
    if variant == "3d":
        return ProcessWord("A" * (r - 1) + "B" + "A" * (r - 2) + "BABAAB", "I")
    raise ValueError(f"variant must be '2d' or '3d', got {variant!r}")


def _check_r(r: int, variant: str):
    lo = {"2d": 5, "3d": 10}.get(variant)
    if lo is None:
        raise ValueError(f"variant must be '2d' or '3d', got {variant!r}")
    if r < lo:
        raise ValueError(f"{variant} closed forms need r >= {lo}, got {r}")


def closed_form_pair(r: int, variant: str = "2d") -> ExponentPair:
    _check_r(r, variant)
    t = 2**r
    if variant == "2d":
        den = 2 * t * t - (2 * r + 4) * t + 4 * r
        return ExponentPair(F(t - 2 * r, den), 1 - F(r * t - 2 * r * r + 2 * r - 4, den))
    den = 26 * t * t - (16 * r + 54) * t + 32 * r + 24
    return ExponentPair(F(13 * t - 16 * r - 12, den), 1 - F(13 * r * t - 16 * r * r + 4 * r - 20, den))


def theta_closed(r: int, variant: str = "2d") -> Fraction:
    """theta(1, 2^r) (2d) or theta(1, 2^r, 2^r) (3d) from the closed formulas."""
    _check_r(r, variant)
    t = 2**r
    if variant == "2d":
        return F(t - 2 * r, t * t - r * t - 2 * r * r + 2 * r - 4)
    num = 26 * t * t - (29 * r + 41) * t + 16 * r * r + 12 * r + 32
    den = 26 * t**3 - (16 * r + 41) * t * t + (24 * r - 3) * t + 16 * r + 12
    return F(num, den)


def condition_value(pair: ExponentPair, m: int) -> Fraction:
    return 2 * pair.l - 2 * m * pair.k - 1


def theta_second_case(pair: ExponentPair, m: int) -> Fraction:
    """theta(1, m) = k / (m k - l + 1), valid when 2l - 2mk - 1 <= 0."""
    if m < 2:
        raise ValueError("scale m must be >= 2")
    c = condition_value(pair, m)
    if c > 0:
        raise FirstCaseRegime(
            f"2l - 2mk - 1 = {_r(c)} > 0 for {pair} at m = {m}: first-case regime, external to this artifact"
        )
    return pair.k / (m * pair.k - pair.l + 1)


# -- search ----------------------------------------------------------------


@dataclass
class Candidate:
    value: Fraction
    word: ProcessWord
    pair: ExponentPair

    def key(self):
        return (self.value, len(self.word.steps), self.word.steps, str(self.word.seed))

    def to_dict(self) -> dict:
        return {
            "theta": _r(self.value),
            "theta_approx": float(self.value),
            "word": str(self.word),
            "pair": self.pair.to_dict(),
        }


@dataclass
class SearchResult:
    m: int
    best: Optional[Candidate]
    front: list = field(default_factory=list)
    explored: int = 0
    feasible: int = 0
    max_len: int = 0
    exhaustive: bool = True
    diagnostic: str = ""

    def to_dict(self) -> dict:
        return {
            "objective": f"theta(1,{self.m})",
            "best": None if self.best is None else self.best.to_dict(),
            "pareto_front": [c.to_dict() for c in self.front],
            "explored_pairs": self.explored,
            "feasible_pairs": self.feasible,
            "max_len": self.max_len,
            "exhaustive": self.exhaustive,
            "diagnostic": self.diagnostic,
        }


def pareto_front(cands: Iterable[Candidate]) -> list[Candidate]:
    """Keep pairs not dominated coordinatewise (smaller k and l are better)."""
    best_per_pair: dict = {}
    for c in cands:
        key = (c.pair.k, c.pair.l)
        if key not in best_per_pair or c.key() < best_per_pair[key].key():
            best_per_pair[key] = c
    ordered = sorted(best_per_pair.values(), key=lambda c: (c.pair.k, c.pair.l, c.key()))
    front, best_l = [], None
    for c in ordered:
        if best_l is None or c.pair.l < best_l:
            front.append(c)
            best_l = c.pair.l
    return front


def search_word(
    m: int,
    seeds: Sequence[Union[str, ExponentPair]] = ("I",),
    max_len: int = 9,
    beam_width: int = 4096,
    exhaustive: bool = True,
    objective: Optional[Callable[[ExponentPair], Fraction]] = None,
) -> SearchResult:
    """Minimize theta(1, m) over words of at most ``max_len`` letters.

    Pairs are deduplicated (B B is the identity, A fixes (0, 1)), so the
    exhaustive mode visits each reachable pair once, at its shortest word.
    Beam mode keeps the ``beam_width`` best states per layer ranked by
    k / (mk - l + 1); it coincides with exhaustive search while layers fit.
    """
    if exhaustive and max_len > 24:
        raise ValueError("exhaustive search is limited to max_len <= 24; use beam mode")
    obj = objective or (lambda p: theta_second_case(p, m))
    seen: dict = {}
    layer = []
    for s in seeds:
        w = ProcessWord("", s)
        p = w.seed_pair()
        if (p.k, p.l) not in seen:
            seen[(p.k, p.l)] = w
            layer.append((p, w))
    feasible: list[Candidate] = []

    def consider(p, w):
        try:
            v = obj(p)
        except FirstCaseRegime:
            return
        feasible.append(Candidate(F(v), w, p))

    for p, w in layer:
        consider(p, w)
    for _depth in range(max_len):
        nxt = []
        for p, w in layer:
            for step in "AB":
                if step == "B" and w.steps.startswith("B"):
                    continue
                q = apply_process(step, p)
                key = (q.k, q.l)
                if key in seen:
                    continue
                nw = ProcessWord(step + w.steps, w.seed)
                seen[key] = nw
                nxt.append((q, nw))
        if not exhaustive and len(nxt) > beam_width:
            nxt.sort(key=lambda t: (t[0].k / (m * t[0].k - t[0].l + 1), len(t[1].steps), t[1].steps))
            nxt = nxt[:beam_width]
        for q, nw in nxt:
            consider(q, nw)
        layer = nxt
        if not layer:
            break
    best = min(feasible, key=Candidate.key) if feasible else None
    diag = "" if best else "no word satisfies 2l - 2mk - 1 <= 0 within the search space"
    return SearchResult(
        m=m,
        best=best,
        front=pareto_front(feasible),
        explored=len(seen),
        feasible=len(feasible),
        max_len=max_len,
        exhaustive=exhaustive,
        diagnostic=diag,
    )


def word_report(word: Union[ProcessWord, str], m: Optional[int] = None) -> dict:
    if isinstance(word, str):
        word = parse_word(word)
    pair = eval_word(word)
    out = {"word": str(word), "letters": len(word.steps), "pair": pair.to_dict(), "in_region": pair.in_region()}
    if m is not None:
        c = condition_value(pair, m)
        out["m"] = m
        out["condition"] = _r(c)
        try:
            out["theta"] = _r(theta_second_case(pair, m))
            out["provenance"] = "pair-derived (second case)"
        except FirstCaseRegime:
            out["theta"] = None
            out["provenance"] = "first-case regime: external formula needed"
    return out
