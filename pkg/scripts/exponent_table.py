"""Print the theta table and exponent reports for a grid of (m, k)."""

import argparse
import sys

from expdiv.exponents import render_table, report, theta_table


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-m", type=int, default=3)
    ap.add_argument("--max-k", type=int, default=4)
    ap.add_argument("--rh", action="store_true")
    args = ap.parse_args(argv)
    print(render_table(theta_table()))
    for m in range(0, args.max_m + 1):
        for k in range(2, args.max_k + 1):
            print()
            print(report(m, k, rh=args.rh).render_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
