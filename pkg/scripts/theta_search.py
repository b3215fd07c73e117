"""Search process words minimizing theta(1, m) and print the best and the Pareto front."""

import argparse
import json
import sys
import time

from expdiv.config import SearchConfig
from expdiv.expairs import search_word


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=16)
    ap.add_argument("--max-len", type=int, default=9)
    ap.add_argument("--seeds", default="I", help="comma-separated seed pairs, e.g. I,H05")
    ap.add_argument("--beam", type=int, default=None, help="beam width (exhaustive when omitted)")
    args = ap.parse_args(argv)
    cfg = SearchConfig(
        m=args.m,
        max_len=args.max_len,
        seeds=tuple(args.seeds.split(",")),
        exhaustive=args.beam is None,
        beam_width=args.beam or 4096,
    )
    t = time.perf_counter()
    res = search_word(cfg.m, cfg.seeds, cfg.max_len, cfg.beam_width, cfg.exhaustive)
    out = res.to_dict()
    out["seconds"] = round(time.perf_counter() - t, 3)
    print(json.dumps(out, indent=2))
    return 0 if res.best is not None else 1


if __name__ == "__main__":
    sys.exit(main())
