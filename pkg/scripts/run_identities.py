#!/usr/bin/env python3
"""Run the transform/product identity suite and save the JSON report."""

import argparse
import json
import pathlib
import sys
import time

from phaselab import suites


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=32, help="grid size for the product identities")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/identities.json")
    args = ap.parse_args()

    t0 = time.time()
    checks = []
    checks += suites.suite_involution(seed=args.seed)
    checks += suites.suite_convention(seed=args.seed + 1)
    checks += suites.suite_products(n=min(args.grid, 32), seed=args.seed + 2)
    checks += suites.suite_routes(seed=args.seed + 3)
    checks += suites.suite_kernel_factorization(seed=args.seed + 4)
    report = {
        "config": {"grid": args.grid, "seed": args.seed},
        "checks": [c.as_dict() for c in checks],
        "timing": {"total_s": time.time() - t0},
    }
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    for c in checks:
        print(f"{'ok ' if c.passed else 'BAD'} {c.name}: {c.value:.3g}")
    print(f"wrote {out}")
    return 0 if all(c.passed for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
