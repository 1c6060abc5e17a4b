#!/usr/bin/env python3
"""Render the display-only companion figures.

Writes two images (pole landscape of |f_1| over a strip of the upper
half-plane, and damped-Newton convergence traces) into --out-dir.
Requires matplotlib; everything the tests check is independent of this
script.

Usage: python3 scripts/make_plots.py [--out-dir plots]
"""

import argparse

from qschwarz.cli import _write_plots


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="plots")
    args = ap.parse_args()
    for path in _write_plots(args.out_dir):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
