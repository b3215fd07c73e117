"""Partial sums at checkpoints plus the fitted error against A x + B x^(1/n).

    python3 scripts/run_sums.py --function E3tau --config run.json
"""

import argparse
import json
import sys

from expdiv.arith import parse_function
from expdiv.config import SumRunConfig, from_dict
from expdiv.sums import checkpoint_sums, fit_error_exponent, mean_a, secondary_constant


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--function", default=None)
    ap.add_argument("--config", default=None, help="JSON file with SumRunConfig fields")
    ap.add_argument("--csv", action="store_true", help="print the per-checkpoint table instead of the fit")
    args = ap.parse_args(argv)
    raw = json.load(open(args.config)) if args.config else {}
    if args.function:
        raw["function"] = args.function
    cfg = from_dict(SumRunConfig, raw)
    f = parse_function(cfg.function)
    cs = checkpoint_sums(f, cfg.checkpoints, shard=cfg.shard, workers=cfg.workers, cache_dir=cfg.cache_dir)
    a, _, _ = mean_a(f)
    try:
        b, n, _ = secondary_constant(f)
    except ValueError as exc:
        print(f"# no secondary term: {exc}", file=sys.stderr)
        b, n = 0.0, None
    if args.csv:
        sys.stdout.write(cs.to_csv(a, b, n))
    else:
        print(json.dumps(fit_error_exponent(cs, a, b, n).to_dict(), indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
