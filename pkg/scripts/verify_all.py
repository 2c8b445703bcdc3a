"""Run every verification suite and write the claim reports to a JSON file."""
import argparse
import sys

from hispace.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="reports/verification.json")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args()
    sys.exit(cli_main(["verify", "--suite", "all", "--seed", str(args.seed), "--jobs", str(args.jobs),
                       "--out", args.out]))


if __name__ == "__main__":
    main()
