#!/usr/bin/env python3
"""ARMS outcome fractions per order parameter, with a text bar chart of the cycling share."""
import argparse
import sys
import time

from protolife.arms_chem import SweepParams, sweep, sweep_csv
from protolife.config import SweepConfig


def main(argv=None):
    d = SweepConfig()
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--grid", type=float, nargs="+",
                    default=[i / 10 for i in range(11)])
    ap.add_argument("--runs", type=int, default=d.runs_per_point)
    ap.add_argument("--max-steps", type=int, default=SweepParams.max_steps)
    ap.add_argument("--rules", type=int, default=SweepParams.n_rules)
    ap.add_argument("--stochastic", action="store_true", help="uniform choice among applicable rules")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args(argv)

    params = SweepParams(n_rules=args.rules, max_steps=args.max_steps,
                         stochastic_rule_choice=args.stochastic)
    t0 = time.perf_counter()
    rows = sweep(args.seed, args.grid, args.runs, params, args.workers)
    print(f"{len(args.grid) * args.runs} runs in {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    for r in rows:
        bar = "#" * round(40 * r.cycling)
        print(f"rho={r.target:4.2f}  cycling={r.cycling:5.3f}  {bar}", file=sys.stderr)
    text = sweep_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
