#!/usr/bin/env python3
"""Timing sweep over power-of-two band-limits, with a fitted cost exponent.

Writes one CSV row per band-limit and prints the log-log slope of the mean
transform time. Use --transform flaglet --multires to see the reduced-grid
speedup on the same sizes.
"""

import argparse
import sys

from ballwav import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--transform", choices=("flag", "flaglet"), default="flag")
    ap.add_argument("--Lmin", type=int, default=8)
    ap.add_argument("--Lmax", type=int, default=64)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--multires", action="store_true")
    ap.add_argument("--out", default=None, help="also write the CSV here")
    args = ap.parse_args()

    sizes = []
    q = args.Lmin
    while q <= args.Lmax:
        sizes.append(q)
        q *= 2
    rows = [cli.CSV_HEADER]
    print(rows[0])
    records = []
    for q in sizes:
        if args.transform == "flag":
            rec = cli.time_flag_roundtrip(q, q, reps=args.reps)
        else:
            rec = cli.time_flaglet_roundtrip(q, q, reps=args.reps,
                                             multires=args.multires)
        records.append(rec)
        rows.append(rec.csv_row())
        print(rows[-1], flush=True)
    slope = cli.fit_loglog_slope(sizes, [r.t_c_s for r in records])
    print("# fitted_slope=%.3f" % slope)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(rows) + "\n# fitted_slope=%.3f\n" % slope)
    return 0


if __name__ == "__main__":
    sys.exit(main())
