"""Characteristic estimates against powers of beta over a P(1) grid.

Runs the sweep on Hamming(7,4) at s = 2^(k+4) and s = 2^k with the same seed
and renders each to SVG next to its CSV.
"""

import argparse
from pathlib import Path

from wdest import cli

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matrix", default=str(ROOT / "data" / "hamming74.txt"))
    ap.add_argument("--out-dir", default="results/sweep")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out_dir)
    for label, samples in (("large", "2^(k+4)"), ("small", "2^k")):
        csv_path = out / f"sweep_{label}.csv"
        rc = cli.run(["sweep-beta", args.matrix, "--samples", samples, "--seed", str(args.seed),
                      "-o", str(csv_path)])
        if rc:
            raise SystemExit(rc)
        cli.run(["plot", str(csv_path), "-o", str(csv_path.with_suffix(".svg"))])


if __name__ == "__main__":
    main()
