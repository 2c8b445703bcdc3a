"""Gauges of 2^n W + a_n B on the dyadic tree and the diagonal bounds, for every generator of W."""
import argparse
from fractions import Fraction

from hispace.interpolation import diagonal_norm_bounds
from hispace.kernel import index_to_json
from hispace.treespace import TreeParams, gauge, initial_segments, segment_vector
from hispace.tsirelson import MTParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--nmax", type=int, default=8)
    ap.add_argument("--N", type=int, default=3, help="truncation for the diagonal bounds")
    args = ap.parse_args()
    tp = TreeParams(args.depth, "dyadic")
    segs = initial_segments(tp)
    gens = [segment_vector(s, tp) for s in segs]
    outer = MTParams(["A2"], ["1/2"])
    print("segment end | 2^n * gauge_n(w) for n = 1..%d | diagonal [lower, upper]" % args.nmax)
    for s, w in zip(segs, gens):
        ratios = [gauge(w, gens, n, Fraction(1, 2 ** n), tp).value * 2 ** n for n in range(1, args.nmax + 1)]
        d = diagonal_norm_bounds(w, gens, lambda n: Fraction(1, 2 ** n), outer, tp, args.N)
        print(f"{index_to_json(s.hi) or '(root)':>8} | {' '.join(str(r) for r in ratios)} | [{d.lower}, {d.upper}]")


if __name__ == "__main__":
    main()
