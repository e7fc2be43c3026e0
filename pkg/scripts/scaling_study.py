"""Rescaled diameter and two-point distance tables for fixed p and the p(n) ladder.

    python3 scripts/scaling_study.py --sizes 1024,4096,16384 --replicas 30 --out scaling
"""
import argparse
from pathlib import Path

from bipmaps.cli import _rows_csv
from bipmaps.stats import default_jobs, scaling_table, within_factor


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--sizes", default="1024,4096,16384")
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--replicas", type=int, default=30)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--holder-replicas", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    ap.add_argument("--out", default="scaling", help="output directory for the CSV tables")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, params, ladder in (("fixed", {"p": args.p}, False), ("ladder", {}, True)):
        rows = scaling_table("2p-angulation", sizes, params, args.replicas, args.seed, args.jobs,
                             args.pairs, ladder=ladder, holder_replicas=args.holder_replicas)
        (out / f"{name}.csv").write_text(_rows_csv(rows))
        meds = [r["diameter_median"] for r in rows]
        two = [r["two_point_median"] for r in rows]
        print(f"{name}: diameter medians {[round(m, 3) for m in meds]}, two-point {[round(t, 3) for t in two]}")
        if len(rows) > 1:
            print(f"  within factor 2: diameter {within_factor(meds)}, two-point {within_factor(two)}")


if __name__ == "__main__":
    main()
