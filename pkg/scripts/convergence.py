"""Median TVD between estimated and exact weight distributions against s = 2^(k-g).

Defaults to the [33,13] cyclic code with P(1) = 0.95 (beta = -0.9).  Pass
``--beta -0.95`` for the alternative reading of that balance.
"""

import argparse
from pathlib import Path

from wdest import cli

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matrix", default=str(ROOT / "data" / "bch_33_13.txt"))
    bal = ap.add_mutually_exclusive_group()
    bal.add_argument("--p-one", type=float)
    bal.add_argument("--beta", type=float)
    ap.add_argument("--g-list", default="6,4,2,0,-2")
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--batches", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", default="results/convergence")
    args = ap.parse_args()
    balance = ["--beta", str(args.beta)] if args.beta is not None else \
        ["--p-one", str(0.95 if args.p_one is None else args.p_one)]
    out = Path(args.out_dir)
    csv_path = out / "convergence.csv"
    rc = cli.run(["convergence", args.matrix, *balance, "--g-list", args.g_list,
                  "--repeats", str(args.repeats), "--batches", str(args.batches),
                  "--workers", str(args.workers), "-o", str(csv_path)])
    if rc:
        raise SystemExit(rc)
    cli.run(["plot", str(csv_path), "-o", str(out / "convergence.svg")])


if __name__ == "__main__":
    main()
