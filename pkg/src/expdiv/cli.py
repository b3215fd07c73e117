"""expdiv command line.

Exit codes: 0 success or verification passed, 1 verification failed,
2 usage error.  JSON output is deterministic (sorted keys, rationals as
"p/q" strings).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from .arith import EPower, GaussTau, MultiplicativeSpec, TauK, parse_function
from .util import dumps, parse_rat, rat_str, write_atomic

FORMATS = ("json", "csv", "text")


class UsageError(Exception):
    pass


@dataclass
class CommandPlan:
    subcommand: str
    params: dict = field(default_factory=dict)
    fmt: str = "json"
    output: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CommandPlan":
        return cls(**json.loads(text))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--format", dest="fmt", choices=FORMATS, default=None)
    p.add_argument("--output", "-o", default=None, help="write the artifact here (atomically)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="expdiv", description="Exponential divisor functions: series, exponent pairs, exponents, sums.")
    sub = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    series = sub.add_parser("series", help="Bell-series factorizations").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = series.add_parser("factor", help="greedy zeta-word factorization")
    p.add_argument("--function", required=True)
    p.add_argument("--order", type=int, default=24)
    p.add_argument("--prime", default="generic")
    _common(p)
    p = series.add_parser("verify", help="check a zeta word against a function")
    p.add_argument("--function", required=True)
    p.add_argument("--word", default=None, help='e.g. "1:1,16:1,17:-1,32:-1,33:1,48:1"')
    p.add_argument("--claimed", type=int, default=None)
    p.add_argument("--order", type=int, default=None, help="compute the residual through this degree")
    _common(p)

    pair = sub.add_parser("pair", help="exponent pairs").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = pair.add_parser("eval", help="evaluate a process word")
    p.add_argument("word", nargs="+")
    p.add_argument("--m", type=int, default=None, help="also report theta(1,m)")
    _common(p)
    p = pair.add_parser("search", help="search process words")
    p.add_argument("--objective", required=True, help="theta(1,m)")
    p.add_argument("--seeds", default="I")
    p.add_argument("--max-len", type=int, default=9)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--beam-width", type=int, default=None)
    _common(p)

    theta = sub.add_parser("theta", help="theta bounds").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = theta.add_parser("table")
    _common(p)

    expo = sub.add_parser("exponent", help="asymptotic exponents").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = expo.add_parser("report")
    p.add_argument("--m", type=int, required=True, help="tower index of the scale")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--rh", action="store_true")
    _common(p)
    p = expo.add_parser("beta", help="(1 - a t)/(a + c - 2 a c t) under RH")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--theta", required=True)
    _common(p)

    sums = sub.add_parser("sum", help="partial sums").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in ("run", "fit"):
        p = sums.add_parser(verb)
        p.add_argument("--function", required=True)
        p.add_argument("--checkpoints", default=None, help="comma-separated, increasing")
        p.add_argument("--config", default=None, help="key=value file (checkpoints, shard, cache_dir, workers)")
        p.add_argument("--shard", type=int, default=None)
        p.add_argument("--cache-dir", default=None)
        p.add_argument("--workers", type=int, default=None)
        _common(p)

    sup = sub.add_parser("support", help="support of E^m f").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = sup.add_parser("scan")
    p.add_argument("--function", default="tau")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--check-structure", action="store_true", help="check oplus, 3 oplus, 5 oplus and odd multiples (tau only)")
    _common(p)
    return ap


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for i, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{i}: expected key=value")
            k, v = (t.strip() for t in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _checkpoints(text: str) -> list[int]:
    try:
        cps = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"malformed checkpoint list {text!r}") from None
    if not cps or any(b <= a for a, b in zip(cps, cps[1:])) or cps[0] < 1:
        raise UsageError("checkpoints must be positive and strictly increasing")
    return cps


def _function(name: str) -> MultiplicativeSpec:
    try:
        return parse_function(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse(argv) -> CommandPlan:
    """Validate argv into a plan; raises UsageError."""
    ns = build_parser().parse_args(list(argv))
    sub = f"{ns.group} {ns.verb}"
    params = {k: v for k, v in vars(ns).items() if k not in ("group", "verb", "fmt", "output")}
    fmt = ns.fmt or "json"
    if sub in ("series factor", "series verify", "sum run", "sum fit") or (sub == "support scan"):
        _function(params["function"])
    if sub == "series factor" and params["order"] < 1:
        raise UsageError("--order must be >= 1")
    if sub == "series verify":
        if params["word"] is not None:
            from .bell import ZetaWord

            try:
                ZetaWord.parse(params["word"])
            except ValueError as exc:
                raise UsageError(f"malformed word: {exc}") from None
    if sub == "pair eval":
        params["word"] = " ".join(params["word"])
        from .expairs import parse_word

        try:
            parse_word(params["word"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if params["m"] is not None and params["m"] < 2:
            raise UsageError("--m must be >= 2")
    if sub == "pair search":
        params["m"] = _objective(params.pop("objective"))
        if params["max_len"] < 0:
            raise UsageError("--max-len must be >= 0")
        if params["exhaustive"] and params["max_len"] > 24:
            raise UsageError("exhaustive search allows --max-len <= 24; use --beam-width")
        if not params["exhaustive"] and params["beam_width"] is None:
            params["exhaustive"] = True
            if params["max_len"] > 24:
                raise UsageError("--max-len > 24 needs --beam-width")
        if params["beam_width"] is not None and params["beam_width"] < 1:
            raise UsageError("--beam-width must be >= 1")
        params["seeds"] = [s.strip() for s in params["seeds"].split(",") if s.strip()]
        from .expairs import SEEDS

        for s in params["seeds"]:
            if s not in SEEDS:
                raise UsageError(f"unknown seed {s!r}")
    if sub == "exponent report" and (params["m"] < 0 or params["k"] < 2):
        raise UsageError("need --m >= 0 and --k >= 2")
    if sub == "exponent beta":
        try:
            params["theta"] = rat_str(parse_rat(params["theta"]))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if sub in ("sum run", "sum fit"):
        cfg = read_config(params.pop("config")) if params.get("config") else {}
        cps = params.pop("checkpoints") or cfg.get("checkpoints")
        params["checkpoints"] = _checkpoints(cps) if cps else None
        for key, conv in (("shard", int), ("cache_dir", str), ("workers", int)):
            if params.get(key) is None and key in cfg:
                try:
                    params[key] = conv(cfg[key])
                except ValueError:
                    raise UsageError(f"bad config value for {key}") from None
        params.setdefault("shard", None)
        if sub == "sum run" and ns.fmt is None:
            fmt = "csv"
    if sub == "support scan":
        if params["m"] < 0 or params["bound"] < 1:
            raise UsageError("need --m >= 0 and --bound >= 1")
    return CommandPlan(sub, params, fmt, ns.output)


def _objective(text: str) -> int:
    import re

    t = text.replace(" ", "")
    m = re.fullmatch(r"theta\(1,(\d+)\)", t)
    if m:
        val = int(m.group(1))
        if val < 2:
            raise UsageError("objective scale must be >= 2")
        return val
    if re.fullmatch(r"theta\(1,(\d+),(\d+)\)", t):
        raise UsageError("theta(1,m,m) needs the three-dimensional formula, which is not implemented")
    raise UsageError(f"malformed objective {text!r}; use theta(1,m)")


# -- execution ----------------------------------------------------------------


def default_word(f: MultiplicativeSpec):
    """Closed-form word attached to a function family, or None.

    The local coefficients of E^m f are E^(m-1) f(a), so the word's second
    scale is n(E^(m-1) tau_k) = oplus(m - 1).
    """
    from .bell import exp_tau_k_word, gauss_exp_word, tau_k_power_word, tau_power_word
    from .eop import oplus

    if isinstance(f, EPower) and isinstance(f.base, TauK):
        k, m = f.base.k, f.m
        if m == 1:
            return exp_tau_k_word(k)
        return tau_power_word(oplus(m - 1)) if k == 2 else tau_k_power_word(oplus(m - 1), k)
    if isinstance(f, EPower) and isinstance(f.base, GaussTau) and f.m == 1:
        return gauss_exp_word()
    return None


def _series_verify(pm):
    from .bell import ZetaWord, verify_expansion

    f = _function(pm["function"])
    w = ZetaWord.parse(pm["word"]) if pm["word"] else default_word(f)
    if w is None:
        raise UsageError(f"no closed-form word for {f.name}; pass --word")
    res = verify_expansion(f, w, T=pm["order"], claimed=pm["claimed"])
    return res.to_dict(), (0 if res.passed else 1)


def _series_factor(pm):
    from .bell import greedy_factor, local_series

    f = _function(pm["function"])
    prime = pm["prime"] if pm["prime"] == "generic" else int(pm["prime"])
    w, r = greedy_factor(local_series(f, pm["order"], prime), pm["order"])
    return {"function": f.name, "word": w.to_dict(), "residual": r.to_list()}, 0


def _pair_eval(pm):
    from .expairs import word_report

    return word_report(pm["word"], pm["m"]), 0


def _pair_search(pm):
    from .expairs import search_word

    exhaustive = pm["exhaustive"] and pm["beam_width"] is None
    res = search_word(
        pm["m"],
        seeds=tuple(pm["seeds"]),
        max_len=pm["max_len"],
        beam_width=pm["beam_width"] or 4096,
        exhaustive=exhaustive,
    )
    return res.to_dict(), 0 if res.best is not None else 1


def _theta_table(pm):
    from .exponents import theta_table

    return theta_table(), 0


def _exponent_report(pm):
    from .exponents import report

    return report(pm["m"], pm["k"], pm["rh"]), 0


def _exponent_beta(pm):
    from .exponents import beta_nowak

    try:
        return beta_nowak(pm["a"], pm["b"], pm["c"], parse_rat(pm["theta"])).to_dict(), 0
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _sum_common(pm):
    from .sums import checkpoint_sums

    f = _function(pm["function"])
    kw = {}
    if pm.get("shard"):
        kw["shard"] = pm["shard"]
    if pm.get("workers"):
        kw["workers"] = pm["workers"]
    cs = checkpoint_sums(f, pm["checkpoints"], cache_dir=pm.get("cache_dir"), **kw)
    return f, cs


def _constants(f):
    from .sums import mean_a, secondary_constant

    try:
        a, _, _ = mean_a(f)
    except ValueError:
        return None, 0.0, None
    try:
        b, n, _ = secondary_constant(f)
    except ValueError:
        b, n = 0.0, None
    return a, b, n


def _sum_run(pm):
    f, cs = _sum_common(pm)
    a, b, n = _constants(f)
    return cs, a, b, n


def _sum_fit(pm):
    from .sums import fit_error_exponent

    f, cs = _sum_common(pm)
    a, b, n = _constants(f)
    if a is None:
        raise UsageError(f"no mean value available for {f.name}")
    return fit_error_exponent(cs, a, b, n).to_dict(), 0


def _support_scan(pm):
    from .eop import support_scan
    from .sums import verify_min_elements

    f = _function(pm["function"])
    if pm["check_structure"]:
        if f != TauK(2):
            raise UsageError("--check-structure is defined for tau only")
        r = verify_min_elements(pm["m"], pm["bound"])
        return r.to_dict(), 1 if r.status == "fail" else 0
    try:
        prof = support_scan(f, pm["m"], pm["bound"])
    except OverflowError as exc:
        raise UsageError(str(exc)) from None
    return {"function": f.name, "m": pm["m"], "bound": pm["bound"], "elements": prof.elements}, 0


def _render(plan: CommandPlan, result) -> str:
    from .exponents import ExponentReport, render_table

    if plan.subcommand == "sum run":
        cs, a, b, n = result
        if plan.fmt == "csv":
            return cs.to_csv(a or 0.0, b, n)
        d = cs.to_dict()
        d.update({"mean_a": None if a is None else repr(a), "mean_b": repr(b), "scale": n})
        return dumps(d)
    if isinstance(result, ExponentReport):
        return result.render_text() if plan.fmt == "text" else dumps(result.to_dict())
    if plan.subcommand == "theta table" and plan.fmt == "text":
        return render_table(result)
    if plan.fmt == "csv":
        raise UsageError(f"{plan.subcommand} has no CSV form")
    if plan.fmt == "text" and isinstance(result, dict):
        return "".join(f"{k}: {v}\n" for k, v in sorted(result.items()))
    return dumps(result)


HANDLERS = {
    "series verify": _series_verify,
    "series factor": _series_factor,
    "pair eval": _pair_eval,
    "pair search": _pair_search,
    "theta table": _theta_table,
    "exponent report": _exponent_report,
    "exponent beta": _exponent_beta,
    "sum run": _sum_run,
    "sum fit": _sum_fit,
    "support scan": _support_scan,
}


def execute(plan: CommandPlan, stdout=None) -> int:
    stdout = stdout or sys.stdout
    out = HANDLERS[plan.subcommand](plan.params)
    if plan.subcommand == "sum run":
        result, code = out, 0
    else:
        result, code = out
    text = _render(plan, result)
    if plan.output:
        write_atomic(plan.output, text)
    else:
        stdout.write(text)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse(argv)
        return execute(plan)
    except UsageError as exc:
        print(f"expdiv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
