"""Betti numbers of omega, k and the ring for the bundled examples, as a table."""

from __future__ import annotations

import argparse

from minmult.hmm import from_betti
from minmult.resolution import betti_numbers
from minmult.session import Session


def rows(rmax: int):
    for r in range(1, rmax + 1):
        yield f"minmult r={r}", Session.from_file("ex_minmult_r", params={"r": str(r)})
    yield "alpha", Session.from_file("ex_alpha")
    yield "kunneth", Session.from_file("ex_kunneth")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--length", type=int, default=6)
    ap.add_argument("--rmax", type=int, default=4)
    args = ap.parse_args()
    for name, s in rows(args.rmax):
        for mod in ("omega", "k"):
            b = betti_numbers(s.module(mod), args.length)
            print(f"{name:14s} {mod:6s} {str(b):60s} {from_betti(b)}")


if __name__ == "__main__":
    main()
