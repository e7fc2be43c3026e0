"""Run the acceptance criteria and print one PASS/FAIL line each.

    python3 scripts/run_acceptance.py            # all criteria
    python3 scripts/run_acceptance.py 1 5 11     # a subset
    python3 scripts/run_acceptance.py --json out.json
"""
import argparse
import json
import sys

from bipmaps.suites import ACCEPTANCE, ACCEPTANCE_SEED, run_criterion


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("criteria", nargs="*", type=int, help="criterion numbers (default: all)")
    ap.add_argument("--seed", type=int, default=ACCEPTANCE_SEED)
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--json", help="write the suite reports here")
    args = ap.parse_args()
    chosen = [c for c in ACCEPTANCE if not args.criteria or c.number in args.criteria]
    reports, all_ok = {}, True
    for c in chosen:
        ok, line, results = run_criterion(c, args.seed, args.jobs)
        print(line, flush=True)
        all_ok &= ok
        reports[c.number] = {"ok": ok, "line": line,
                             "suites": [{"name": r.name, "ok": r.ok, "summary": r.summary, "report": r.report}
                                        for r in results]}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2, default=str)
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
