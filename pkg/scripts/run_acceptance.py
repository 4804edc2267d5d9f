#!/usr/bin/env python3
"""Run acceptance criteria 1-10 and print a summary table (exit 1 on failure)."""
import argparse
import sys

from pfperiods.verify import run_all


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    reports = run_all(args.seed)
    for r in reports:
        print(f"{r.number:>2}  {'PASS' if r.passed else 'FAIL'}  {r.runtime:6.2f}s / {r.budget:4.0f}s  "
              f"{r.title}")
        for c in r.checks:
            print(f"      {c.name}: {c.value:.3e} ({c.op} {c.threshold:g})")
    ok = all(r.passed for r in reports)
    print("all criteria pass" if ok else "SOME CRITERIA FAIL")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
