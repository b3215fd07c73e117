"""Rendering helpers shared by the JSON reports."""

from __future__ import annotations

import json
import os
import sys
import tempfile
from fractions import Fraction


def int_str(n: int) -> str:
    """str(n) without the interpreter's digit limit (tower scales get huge)."""
    try:
        return str(n)
    except ValueError:
        old = sys.get_int_max_str_digits()
        sys.set_int_max_str_digits(0)
        try:
            return str(n)
        finally:
            sys.set_int_max_str_digits(old)


def rat_str(x) -> str:
    """Canonical "p/q" (or "p") rendering of an exact rational."""
    x = Fraction(x)
    if x.denominator == 1:
        return int_str(x.numerator)
    return f"{int_str(x.numerator)}/{int_str(x.denominator)}"


def fmt_big(v: int) -> str:
    """Compact rendering of huge integers near a power of two, e.g. 3*2^65536+1."""
    if v.bit_length() <= 200:
        return str(v)
    t = v.bit_length() - 3
    for hi in ((v >> t), (v >> t) + 1):
        d = v - (hi << t)
        if abs(d) < 1 << 32:
            while hi % 2 == 0:
                hi //= 2
                t += 1
            s = f"2^{t}" if hi == 1 else f"{hi}*2^{t}"
            return s + (f"{'+' if d > 0 else '-'}{abs(d)}" if d else "")
    return f"<{v.bit_length()}-bit integer>"


def short_rat(x, limit: int = 60) -> str:
    """rat_str, abbreviated when it is long."""
    x = Fraction(x)
    if x.numerator.bit_length() + x.denominator.bit_length() < 4 * limit:
        s = rat_str(x)
        if len(s) <= limit:
            return s
    num, den = fmt_big(x.numerator), fmt_big(x.denominator)
    if "<" not in num + den:
        wrap = lambda t: f"({t})" if any(c in t for c in "+-*") else t
        return num if x.denominator == 1 else f"{wrap(num)}/{wrap(den)}"
    import mpmath

    return "~" + mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, 7)


def parse_rat(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    s = str(s).strip()
    try:
        return Fraction(s)
    except ValueError as exc:
        raise ValueError(f"malformed rational {s!r}") from exc


def rat_entry(x, digits: int = 12) -> dict:
    x = Fraction(x)
    return {"exact": rat_str(x), "approx": float(f"{float(x):.{digits}g}")}


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
