#!/usr/bin/env python3
"""Export the harmonic tiling kernels for a given configuration as CSV.

Thin wrapper over the kernels subcommand; kept as a script so plotting
notebooks have a one-line provenance for the kernel tables they load.
"""

import argparse
import sys

from ballwav import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=64)
    ap.add_argument("--P", type=int, default=64)
    ap.add_argument("--lambda", dest="lam", type=float, default=2.0)
    ap.add_argument("--nu", type=float, default=2.0)
    ap.add_argument("--J0", type=int, default=0)
    ap.add_argument("--J0p", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    argv = ["kernels", "--L", str(args.L), "--P", str(args.P),
            "--lambda", str(args.lam), "--nu", str(args.nu),
            "--J0", str(args.J0), "--J0p", str(args.J0p)]
    if args.out:
        argv += ["--out", args.out]
    return cli.main(argv)


if __name__ == "__main__":
    sys.exit(main())
