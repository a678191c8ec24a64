#!/usr/bin/env python3
"""Exhaustive and randomized exponent-combinatorics sweeps."""

import argparse
import json
import pathlib
import sys
import time

from phaselab import suites


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--cert-trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/exponent_sweeps.json")
    args = ap.parse_args()

    t0 = time.time()
    checks = []
    checks += suites.suite_exponent_combinatorics(trials=args.trials, seed=args.seed)
    checks += suites.suite_worked_instance()
    checks += suites.suite_interpolation(trials=args.cert_trials, seed=args.seed + 1)
    report = {
        "config": {"trials": args.trials, "cert_trials": args.cert_trials, "seed": args.seed},
        "checks": [c.as_dict() for c in checks],
        "timing": {"total_s": time.time() - t0},
    }
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    for c in checks:
        print(f"{'ok ' if c.passed else 'BAD'} {c.name}")
    print(f"wrote {out}")
    return 0 if all(c.passed for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
