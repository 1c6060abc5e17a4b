#!/usr/bin/env python3
"""Run every numbered verification check and print one line per check.

Equivalent to ``qschwarz report-all`` but prints a compact table instead
of the full JSON document.  Exit status 0 iff everything passes.

Usage: python3 scripts/run_acceptance.py [--only 3 6] [--n-max 4]
"""

import argparse
import time

from qschwarz.cli import ALL_CRITERIA, run_criterion


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--only", type=int, nargs="*", default=None)
    ap.add_argument("--n-max", type=int, default=4)
    args = ap.parse_args()
    ids = sorted(args.only) if args.only else sorted(ALL_CRITERIA)
    bad = [cid for cid in ids if cid not in ALL_CRITERIA]
    if bad:
        ap.error(f"unknown check ids {bad}; valid ids are {sorted(ALL_CRITERIA)}")
    all_ok = True
    for cid in ids:
        t0 = time.perf_counter()
        res = run_criterion(cid, n_max=args.n_max)
        dt = time.perf_counter() - t0
        tag = "PASS" if res["pass"] else "FAIL"
        all_ok = all_ok and res["pass"]
        print(f"[{tag}] {cid:2d}  {res['name']}  ({dt:.2f}s)")
    print("all pass" if all_ok else "FAILURES present")
    return 0 if all_ok else 4


if __name__ == "__main__":
    raise SystemExit(main())
