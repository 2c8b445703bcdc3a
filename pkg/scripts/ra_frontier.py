"""How far the repeated-average hierarchy can be computed on a prefix of a seeded infinite set."""
import argparse

from hispace.families import AverageTooLarge, MTooShort, ra_violations, repeated_averages
from hispace.verify import infinite_set_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prefix", type=int, default=100_000)
    ap.add_argument("--budget", type=int, default=1_000_000)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--seeds", type=int, nargs="*", default=[500, 501, 502])
    args = ap.parse_args()
    for xi in ("0", "1", "2", "w"):
        for seed in args.seeds:
            M = infinite_set_model(seed, args.prefix)
            reached, sizes, why = 0, [], ""
            for n in range(1, args.n + 1):
                try:
                    avgs = repeated_averages(xi, M, n, budget=args.budget)
                except (MTooShort, AverageTooLarge) as e:
                    why = str(e)
                    break
                assert not ra_violations(avgs)
                reached, sizes = n, [len(a.vector) for a in avgs]
            print(f"xi={xi:2s} seed={seed} m_1={M[0]} reached n={reached} supports={sizes} {why}")


if __name__ == "__main__":
    main()
