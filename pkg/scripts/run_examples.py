"""Run the bundled example checks and print one line per check with its timing."""

from __future__ import annotations

import argparse
import sys

from minmult.linalg import Field
from minmult.verify import run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--field", type=int, default=None, help="prime characteristic for every example")
    ap.add_argument("--quick", action="store_true", help="skip the law check on the alpha example")
    args = ap.parse_args()
    f = Field.prime(args.field) if args.field else None
    checks = run_suite(f, args.quick)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:45s} {c.seconds:7.2f} s  {c.computed}")
    bad = sum(not c.passed for c in checks)
    print(f"{len(checks) - bad}/{len(checks)} passed")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
