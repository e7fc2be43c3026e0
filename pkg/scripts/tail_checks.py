"""Tail-bound tables (bridge minimum, path increments, LR, width) for any family.

    python3 scripts/tail_checks.py --family quadrangulation --n 1000 --replicas 10000
"""
import argparse

from bipmaps.suites import tails
from bipmaps.stats import default_jobs


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--family", default="quadrangulation")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--p", type=int)
    ap.add_argument("--replicas", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    args = ap.parse_args()
    params = {"p": args.p} if args.p else {}
    res = tails(args.n, args.replicas, args.seed, args.jobs, args.family, params)
    print(res.csv)
    print(("PASS" if res.ok else "FAIL") + ": " + res.summary)
    return 0 if res.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
