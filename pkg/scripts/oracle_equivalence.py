"""Compare mt_norm with the sup over the enumerated norming set on every vector
with support in [1,6] and entries in {0, +-1, +-1/2}."""
import argparse
import itertools
import time
from fractions import Fraction

from hispace.kernel import FinVec, Interval
from hispace.tsirelson import MTParams, mt_norm, norming_table

SETS = {
    "A2": MTParams(["A2"], ["1/2"]),
    "A3": MTParams(["A3"], ["1/2"]),
    "A2+A3": MTParams(["A2", "A3"], ["1/2", "1/3"]),
    "S1": MTParams(["S1"], ["1/2"]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--full", action="store_true", help="also use the unreduced K^depth where it fits")
    args = ap.parse_args()
    entries = (0, 1, -1, Fraction(1, 2), Fraction(-1, 2))
    vecs = [FinVec.from_list(v) for v in itertools.product(entries, repeat=6)]
    for name, p in SETS.items():
        for maximal in ([False, True] if args.full and len(p) == 1 else [True]):
            t0 = time.perf_counter()
            table = norming_table(p, Interval(1, 6), args.depth, maximal=maximal)
            sups = table.sup_many(vecs)
            bad = sum(mt_norm(x, p)[0] != s for x, s in zip(vecs, sups))
            print(f"{name:6s} maximal={maximal!s:5s} functionals={len(table):8d} "
                  f"mismatches={bad} seconds={time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
