"""Command-line driver.

Every command writes its primary outputs (CSV, JSON) plus a
``*.manifest.json`` recording the full argument vector, so
``wdest replay MANIFEST`` regenerates them byte for byte.  No environment
variables are read.

Exit status: 0 success, 2 usage error, 3 input/parse error, 4 enumeration
cap exceeded, 5 solver iteration budget exhausted.

CSV schemas (header row, comma separated, floats with 17 significant digits):

  exact         l,A_l
  estimate      weights.csv: l,A_hat_l
                exponents.csv: b,chi_star,l_hat,rounded   (unresolved: l_hat=inf, rounded=-1)
  sweep-beta    p_one,beta,b,chi_star,analytic_power,weight
  convergence   g,s,seed,tvd,cost_parity      (s = 2^(k-g); cost_parity=1 where s = 2^k)
                summary: g,median_tvd
  isd-demo      trial,solver,iterations,success,recovered_ok
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, code as codes, estimator, gf2, isd
from .errors import (CapExceeded, IterationsExhausted, LengthMismatch, Malformed, ParseError,
                     RankDeficient, WdestError)
from .rng import BalanceSpec, BitSource
from .transform import fwht

EXIT_USAGE, EXIT_INPUT, EXIT_CAP, EXIT_EXHAUSTED = 2, 3, 4, 5


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def parse_samples(text: str, k: int) -> int:
    """``16384``, ``2^14``, ``2^k``, ``2^(k+4)`` or ``2^(k-2)``."""
    t = text.strip().replace(" ", "")
    if t.isdigit():
        s = int(t)
    else:
        m = re.fullmatch(r"2\^(\d+)", t) or re.fullmatch(r"2\^\(?k(?:([+-])(\d+))?\)?", t)
        if not m:
            raise UsageError(f"cannot parse sample count {text!r}")
        if t[2:].isdigit():
            s = 1 << int(t[2:])
        else:
            sign, g = m.group(1), m.group(2)
            e = k + (0 if g is None else (int(g) if sign == "+" else -int(g)))
            if e < 0:
                raise UsageError(f"sample exponent {e} is negative")
            s = 1 << e
    if s < 1:
        raise UsageError("sample count must be positive")
    return s


def resolve_samples(args, k: int) -> int:
    if args.samples is not None and args.g is not None:
        raise UsageError("--samples and --g are mutually exclusive")
    if args.g is not None:
        if k + args.g < 0:
            raise UsageError("k + g must be non-negative")
        return 1 << (k + args.g)
    return parse_samples(args.samples or "2^(k+4)", k)


def resolve_balance(args) -> BalanceSpec:
    if args.beta is not None and args.p_one is not None:
        raise UsageError("--beta and --p-one are mutually exclusive")
    if args.beta is None and args.p_one is None:
        raise UsageError("one of --beta or --p-one is required")
    try:
        return BalanceSpec(args.beta) if args.beta is not None else BalanceSpec.from_p_one(args.p_one)
    except ValueError as e:
        raise UsageError(str(e)) from None


class Outputs:
    """Collects output files and writes them together; nothing is left behind on failure."""

    def __init__(self, argv: list[str], command: str, params: dict, timestamp: str | None = None):
        self.files: dict[Path, bytes] = {}
        self.manifest = {
            "command": command,
            "argv": argv,
            "params": params,
            "tool_version": __version__,
            "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }

    def add(self, path, data):
        self.files[Path(path)] = data.encode("utf-8") if isinstance(data, str) else data

    def commit(self, manifest_path):
        self.add(manifest_path, json.dumps(self.manifest, indent=2, sort_keys=True) + "\n")
        written = []
        try:
            for path, data in self.files.items():
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_bytes(data)
                written.append(path)
        except BaseException:
            for p in written:
                p.unlink(missing_ok=True)
            raise


def _load(path: str) -> codes.LinearCode:
    try:
        return codes.load_generator_file(path)
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror or e}") from None


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def cmd_exact(args, argv):
    code = _load(args.matrix)
    A = codes.enumerate_weights(code, cap=args.cap)
    out = Outputs(argv, "exact", {"matrix": args.matrix, "n": code.n, "k": code.k,
                                  "cap": args.cap}, args.timestamp)
    print(",".join(str(int(a)) for a in A))
    if args.csv:
        out.add(args.csv, to_csv(["l", "A_l"], enumerate(A)))
        out.commit(_manifest_path(Path(args.csv)))


def _config(args, code, bal, samples, seed=None) -> estimator.EstimationConfig:
    return estimator.EstimationConfig(
        samples=samples, bal=bal, seed=args.seed if seed is None else seed,
        batches=args.batches, sampler=getattr(args, "sampler", "direct"), cap=args.cap)


def cmd_estimate(args, argv):
    code = _load(args.matrix)
    bal = resolve_balance(args)
    s = resolve_samples(args, code.k)
    cfg = _config(args, code, bal, s)
    rep = estimator.estimate_weight_distribution(code, cfg, workers=args.workers)
    params = {"matrix": args.matrix, "n": code.n, "k": code.k, "beta": bal.beta,
              "p_one": bal.p_one, "samples": s, "seed": args.seed, "batches": args.batches,
              "sampler": cfg.sampler, "cap": args.cap}
    report = {
        "n": code.n, "k": code.k, "beta": bal.beta, "samples": s,
        "a_hat": [int(a) for a in rep.a_hat],
        "unresolved": rep.unresolved,
        "tvd_vs_exact": rep.tvd_vs_exact,
        "exact": None if rep.exact is None else [int(a) for a in rep.exact],
    }
    text = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(text)
    outdir = Path(args.out_dir)
    out = Outputs(argv, "estimate", params, args.timestamp)
    b = np.arange(1, 1 << code.k)
    out.add(outdir / "weights.csv", to_csv(["l", "A_hat_l"], enumerate(rep.a_hat)))
    out.add(outdir / "exponents.csv", to_csv(
        ["b", "chi_star", "l_hat", "rounded"], zip(b, rep.chi_star, rep.exponents, rep.rounded)))
    out.add(outdir / "report.json", text)
    out.commit(outdir / "manifest.json")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {text!r}") from None


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {text!r}") from None


def sweep_rows(code, grid, samples, seed, batches, workers=1, cap=codes.DEFAULT_CAP):
    """Rows of the sweep CSV; p_one = 0.5 is sampled for display only."""
    wts = codes.codeword_weights(code, cap)
    rows = []
    for p in grid:
        if not 0.0 < p < 1.0:
            raise UsageError(f"P(1) = {p} gives |beta| = 1 or is out of range")
        beta = 1.0 - 2.0 * p
        if beta == 0.0:
            print(f"warning: P(1) = {p} gives beta = 0; unusable for exponent recovery",
                  file=sys.stderr)
            # Sample at an unbiased threshold without going through BalanceSpec.
            bal = _UnbiasedBalance()
        else:
            bal = BalanceSpec(beta)
        cfg = estimator.EstimationConfig(samples, bal, seed=seed, batches=batches, cap=cap)
        counts = estimator.sample_counts(code, cfg, workers)
        chi = fwht(counts) / samples
        powers = codes.beta_powers(beta, code.n)
        for b in range(1, 1 << code.k):
            rows.append((p, beta, b, chi[b], powers[wts[b]], wts[b]))
    return rows


class _UnbiasedBalance:
    beta = 0.0
    p_one = 0.5
    epsilon = 0.0
    threshold = 1 << 52


def cmd_sweep_beta(args, argv):
    code = _load(args.matrix)
    grid = _parse_floats(args.p_one_grid)
    if not grid:
        raise UsageError("empty P(1) grid")
    s = resolve_samples(args, code.k)
    rows = sweep_rows(code, grid, s, args.seed, args.batches, args.workers, args.cap)
    out = Outputs(argv, "sweep-beta", {"matrix": args.matrix, "n": code.n, "k": code.k,
                                       "grid": grid, "samples": s, "seed": args.seed,
                                       "batches": args.batches, "cap": args.cap},
                  args.timestamp)
    dev = max(abs(r[3] - r[4]) for r in rows)
    print(f"rows={len(rows)} samples={s} max_abs_deviation={fmt(dev)}")
    out.add(args.out, to_csv(["p_one", "beta", "b", "chi_star", "analytic_power", "weight"], rows))
    out.commit(_manifest_path(Path(args.out)))


def convergence_rows(code, bal, g_list, seeds, batches, workers=1, cap=codes.DEFAULT_CAP):
    if code.k > cap:
        raise CapExceeded(f"k = {code.k} exceeds the enumeration cap {cap}")
    exact = codes.enumerate_weights(code, cap)
    rows = []
    for g in g_list:
        e = code.k - g
        if e < 0:
            raise UsageError(f"g = {g} gives a negative sample exponent")
        s = 1 << e
        for seed in seeds:
            cfg = estimator.EstimationConfig(s, bal, seed=seed, batches=batches, cap=cap)
            counts = estimator.sample_counts(code, cfg, workers)
            chi = estimator.characteristic_from_counts(counts, s)
            a_hat, _, _ = estimator.round_and_tally(
                estimator.estimate_exponents(chi, bal), code.n, code.k)
            rows.append((g, s, seed, estimator.tvd(exact, a_hat, code.k), int(g == 0)))
    return rows


def summarize(rows) -> list[tuple[int, float]]:
    by_g: dict[int, list[float]] = {}
    for g, _, _, t, _ in rows:
        by_g.setdefault(g, []).append(t)
    return [(g, float(np.median(v))) for g, v in by_g.items()]


def cmd_convergence(args, argv):
    code = _load(args.matrix)
    bal = resolve_balance(args)
    g_list = _parse_ints(args.g_list)
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    seeds = [args.seed + r for r in range(args.repeats)]
    rows = convergence_rows(code, bal, g_list, seeds, args.batches, args.workers, args.cap)
    summary = summarize(rows)
    out_path = Path(args.out)
    summary_path = out_path.with_name(out_path.stem + ".summary" + out_path.suffix)
    out = Outputs(argv, "convergence", {"matrix": args.matrix, "n": code.n, "k": code.k,
                                        "beta": bal.beta, "g_list": g_list, "seeds": seeds,
                                        "batches": args.batches, "cap": args.cap},
                  args.timestamp)
    for g, med in summary:
        print(f"g={g:+d} s=2^{code.k - g} median_tvd={fmt(med)}")
    out.add(out_path, to_csv(["g", "s", "seed", "tvd", "cost_parity"], rows))
    out.add(summary_path, to_csv(["g", "median_tvd"], summary))
    out.commit(_manifest_path(out_path))


def isd_demo_rows(n, k, t, j_max, seed, trials, max_iterations=10_000, isd_j=1):
    """Plant errors in toy McEliece instances and attack them both ways.

    recovered_ok is checked independently of the solver: the returned message
    must equal the planted one and re-encrypt to within distance t of the
    ciphertext; the returned support must equal the planted error and
    reproduce the syndrome.
    """
    rows = []
    for trial in range(1, trials + 1):
        src = BitSource(seed, 1000 + trial)
        dmin = 2 * t + 1 if t > 0 else None
        if n == 2 * k:
            code = codes.random_double_circulant_code(k, src, min_distance=dmin)
        else:
            code = codes.random_code(n, k, src, min_distance=dmin)
        key = isd.mceliece_keygen(code, t, seed=int(src.raw(1)[0]))
        m = gf2.BitWord(k, int(src.raw(1)[0]) & ((1 << k) - 1))
        e = isd.random_error(n, t, src)
        mu = gf2.encode(m, key.Gamma) ^ e
        cfg = isd.IsdConfig(j_max=j_max, max_iterations=max_iterations, seed=int(src.raw(1)[0]))
        try:
            res = isd.lee_brickell(key.Gamma, mu, t, cfg)
            ok = res.message == m and gf2.weight(mu ^ gf2.encode(res.message, key.Gamma)) <= t
            rows.append((trial, "lee_brickell", res.iterations, 1, int(ok)))
        except IterationsExhausted:
            rows.append((trial, "lee_brickell", max_iterations, 0, 0))
        H = codes.parity_check(codes.LinearCode(key.Gamma))
        try:
            res = isd.lee_brickell_isd(H, mu, t, min(isd_j, t), cfg)
            ok = (res.support == tuple(e.support())
                  and gf2.compress(H, gf2.BitWord.from_support(n, res.support)) == gf2.compress(H, mu))
            rows.append((trial, "lee_brickell_isd", res.iterations, 1, int(ok)))
        except IterationsExhausted:
            rows.append((trial, "lee_brickell_isd", max_iterations, 0, 0))
    return rows


def cmd_isd_demo(args, argv):
    n, k, t = args.n, args.k, args.t
    if not (1 <= k <= n <= 32) or t < 0 or t > n:
        raise UsageError("need 1 <= k <= n <= 32 and 0 <= t <= n")
    rows = isd_demo_rows(n, k, t, args.j_max, args.seed, args.trials, args.max_iterations,
                         args.isd_j)
    out = Outputs(argv, "isd-demo", {"n": n, "k": k, "t": t, "j_max": args.j_max,
                                     "seed": args.seed, "trials": args.trials,
                                     "max_iterations": args.max_iterations,
                                     "isd_j": args.isd_j}, args.timestamp)
    for solver in ("lee_brickell", "lee_brickell_isd"):
        sel = [r for r in rows if r[1] == solver]
        print(f"{solver}: recovered {sum(r[4] for r in sel)}/{len(sel)}")
    if not all(r[3] for r in rows):
        raise IterationsExhausted("at least one trial exhausted its iteration budget")
    out.add(args.out, to_csv(["trial", "solver", "iterations", "success", "recovered_ok"], rows))
    out.commit(_manifest_path(Path(args.out)))


def cmd_plot(args, argv):
    from . import plotting

    try:
        text = Path(args.csv).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{args.csv}: {e.strerror or e}") from None
    out = Outputs(argv, "plot", {"csv": args.csv, "kind": args.kind}, args.timestamp)
    svg = plotting.render(text, args.kind, timestamp=out.manifest["timestamp"])
    out.add(args.out, svg)
    out.commit(_manifest_path(Path(args.out)))
    print(args.out)


def cmd_replay(args, argv):
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        rest = list(manifest["argv"])
        stamp = manifest.get("timestamp")
    except (OSError, ValueError, KeyError) as e:
        raise ParseError(f"cannot read manifest {args.manifest}: {e}") from None
    if rest and rest[0] == "replay":
        raise UsageError("refusing to replay a replay")
    # Reusing the recorded timestamp keeps embedded metadata (SVG dates) identical.
    return run(rest, timestamp=stamp)


def _add_common(p, balance=True, samples=True):
    p.add_argument("matrix", help="generator matrix file (rows of 0/1, '#' comments)")
    if balance:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--beta", type=float, help="balance P(0) - P(1) of the input bits")
        g.add_argument("--p-one", type=float, help="P(1) of the input bits; beta = 1 - 2 P(1)")
    if samples:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--samples", help="sample count: 16384, 2^14, 2^k, 2^(k+4), 2^(k-2)")
        g.add_argument("--g", type=int, help="sample count s = 2^(k+g); negative allowed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batches", type=int, default=1,
                   help="number of independent substreams the samples are split across")
    p.add_argument("--workers", type=int, default=1,
                   help="threads used for batches; never changes results")
    p.add_argument("--cap", type=int, default=codes.DEFAULT_CAP,
                   help="largest k for which 2^k words are enumerated")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wdest", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="brute-force weight distribution")
    p.add_argument("matrix")
    p.add_argument("--csv", help="also write l,A_l to this file")
    p.add_argument("--cap", type=int, default=codes.DEFAULT_CAP)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("estimate", help="estimate the weight distribution from biased samples")
    _add_common(p)
    p.add_argument("--sampler", choices=estimator.SAMPLERS, default="direct")
    p.add_argument("--out-dir", default="estimate_out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep-beta", help="chi* against analytic powers over a P(1) grid")
    _add_common(p, balance=False)
    p.add_argument("--p-one-grid", default="0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45")
    p.add_argument("-o", "--out", default="sweep.csv")
    p.set_defaults(func=cmd_sweep_beta)

    p = sub.add_parser("convergence", help="TVD against sample size s = 2^(k-g)")
    _add_common(p, samples=False)
    p.add_argument("--g-list", default="6,4,2,0,-2")
    p.add_argument("--repeats", type=int, default=20, help="seeds seed..seed+repeats-1 per g")
    p.add_argument("-o", "--out", default="convergence.csv")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("isd-demo", help="Lee-Brickell attacks on toy McEliece instances")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--j-max", type=int, default=2)
    p.add_argument("--isd-j", type=int, default=1, help="weight j inside the information set")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--max-iterations", type=int, default=10_000)
    p.add_argument("-o", "--out", default="isd.csv")
    p.set_defaults(func=cmd_isd_demo)

    p = sub.add_parser("plot", help="render a sweep or convergence CSV to SVG")
    p.add_argument("csv")
    p.add_argument("--kind", choices=["sweep", "convergence"])
    p.add_argument("-o", "--out", default="plot.svg")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return ap


def run(argv: list[str], timestamp: str | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args.timestamp = timestamp
    try:
        rc = args.func(args, list(argv))
        return rc or 0
    except UsageError as e:
        print(f"wdest: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as e:
        print(f"wdest: cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except IterationsExhausted as e:
        print(f"wdest: solver exhausted: {e}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (ParseError, RankDeficient, LengthMismatch, Malformed, WdestError) as e:
        print(f"wdest: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"wdest: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"wdest: i/o error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else list(argv)))


if __name__ == "__main__":
    main()
