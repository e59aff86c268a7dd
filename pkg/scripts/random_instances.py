"""Random-instance sweeps: the canonical-module test and the Betti-number laws."""

from __future__ import annotations

import argparse
import json

from minmult.duality import canonical_criterion
from minmult.generate import AlgebraShape, algebra_batch
from minmult.linalg import Field
from minmult.verify import law_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--count", type=int, default=80)
    ap.add_argument("--bound", type=int, default=4)
    ap.add_argument("--prime", type=int, default=32003)
    ap.add_argument("--max-length", type=int, default=30)
    ap.add_argument("--skip-laws", action="store_true")
    args = ap.parse_args()
    f = Field.prime(args.prime)
    shape = AlgebraShape(max_length=args.max_length)
    algs = algebra_batch(args.seed, args.count, f, shape)
    bad = [A.fingerprint[:12] for A in algs if canonical_criterion(A, args.bound) != [1] + [0] * args.bound]
    print(json.dumps({"canonical_criterion": {"algebras": len(algs), "failures": bad}}, indent=2))
    if not args.skip_laws:
        s = law_sweep(args.seed, args.count, args.bound, f, shape)
        print(json.dumps({"law_sweep": s.as_dict()}, indent=2))


if __name__ == "__main__":
    main()
