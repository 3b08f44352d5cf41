"""Lee-Brickell attacks on planted toy McEliece instances, with a per-solver tally."""

import argparse
import csv
from collections import Counter
from pathlib import Path

from wdest import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--t", type=int, default=2)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/isd/isd.csv")
    args = ap.parse_args()
    rc = cli.run(["isd-demo", "--n", str(args.n), "--k", str(args.k), "--t", str(args.t),
                  "--trials", str(args.trials), "--seed", str(args.seed), "-o", args.out])
    if rc:
        raise SystemExit(rc)
    iters = Counter()
    with open(Path(args.out), newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        iters[r["solver"]] += int(r["iterations"])
    for solver, total in iters.items():
        print(f"{solver}: mean iterations {total / args.trials:.2f}")


if __name__ == "__main__":
    main()
