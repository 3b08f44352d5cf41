import csv
import io
import json
import math
from pathlib import Path

import pytest

from wdest import cli

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"
HAMMING = str(DATA / "hamming74.txt")


def rows_of(path):
    return list(csv.DictReader(io.StringIO(Path(path).read_text())))


def test_exact_stdout(capsys, tmp_path):
    assert cli.run(["exact", HAMMING]) == 0
    assert capsys.readouterr().out.strip() == "1,0,0,7,7,0,0,1"
    assert cli.run(["exact", str(DATA / "identity4.txt"), "--csv", str(tmp_path / "a.csv")]) == 0
    assert capsys.readouterr().out.strip() == "1,4,6,4,1"
    assert (tmp_path / "a.csv").read_text() == "l,A_l\n0,1\n1,4\n2,6\n3,4\n4,1\n"
    manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert manifest["command"] == "exact" and manifest["argv"][0] == "exact"


def test_exact_errors(tmp_path):
    big = tmp_path / "id30.txt"
    big.write_text("\n".join("0" * i + "1" + "0" * (29 - i) for i in range(30)) + "\n")
    assert cli.run(["exact", str(big)]) == cli.EXIT_CAP
    bad = tmp_path / "bad.txt"
    bad.write_text("101\n10\n")
    assert cli.run(["exact", str(bad)]) == cli.EXIT_INPUT
    dup = tmp_path / "dup.txt"
    dup.write_text("101\n101\n")
    assert cli.run(["exact", str(dup)]) == cli.EXIT_INPUT
    assert cli.run(["exact", str(tmp_path / "missing.txt")]) == cli.EXIT_INPUT
    assert cli.run(["nonsense"]) == cli.EXIT_USAGE


@pytest.mark.parametrize("text,k,want", [
    ("16384", 4, 16384), ("2^14", 4, 16384), ("2^k", 4, 16), ("2^(k+4)", 4, 256),
    ("2^(k-2)", 4, 4), ("2^(k+0)", 3, 8),
])
def test_parse_samples(text, k, want):
    assert cli.parse_samples(text, k) == want


@pytest.mark.parametrize("text", ["2^(k-5)", "abc", "2^", "0"])
def test_parse_samples_rejects(text):
    with pytest.raises(cli.UsageError):
        cli.parse_samples(text, 4)


def test_estimate_golden(tmp_path, capsys):
    out = tmp_path / "est"
    argv = ["estimate", HAMMING, "--p-one", "0.05", "--samples", "2^14", "--seed", "1",
            "--out-dir", str(out)]
    assert cli.run(argv) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tvd_vs_exact"] is not None and report["tvd_vs_exact"] <= 0.0625
    for name in ("weights.csv", "exponents.csv", "report.json"):
        assert (out / name).read_bytes() == (GOLDEN / "estimate_hamming" / name).read_bytes()


def test_estimate_g_shorthand_and_balance_flags(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run(["estimate", HAMMING, "--beta", "0.8", "--g", "3", "--out-dir", str(a)]) == 0
    assert cli.run(["estimate", HAMMING, "--beta", "0.8", "--samples", "2^(k+3)",
                    "--out-dir", str(b)]) == 0
    assert (a / "exponents.csv").read_bytes() == (b / "exponents.csv").read_bytes()
    assert json.loads((a / "report.json").read_text())["samples"] == 128
    assert cli.run(["estimate", HAMMING, "--beta", "0.8", "--p-one", "0.1"]) == cli.EXIT_USAGE
    assert cli.run(["estimate", HAMMING, "--out-dir", str(tmp_path / "c")]) == cli.EXIT_USAGE
    assert cli.run(["estimate", HAMMING, "--beta", "1.0", "--out-dir", str(tmp_path / "d")]) \
        == cli.EXIT_USAGE
    assert not (tmp_path / "c").exists() and not (tmp_path / "d").exists()


def test_estimate_exponent_csv_schema(tmp_path):
    out = tmp_path / "e"
    assert cli.run(["estimate", HAMMING, "--beta", "0.9", "--samples", "2", "--seed", "3",
                    "--out-dir", str(out)]) == 0
    rows = rows_of(out / "exponents.csv")
    assert len(rows) == 15
    for r in rows:
        if r["l_hat"] == "inf":
            assert r["rounded"] == "-1" and float(r["chi_star"]) == 0.0
        else:
            assert 1 <= int(r["rounded"]) <= 7
    report = json.loads((out / "report.json").read_text())
    assert sum(report["a_hat"]) + report["unresolved"] == 16


def test_partial_outputs_removed(tmp_path):
    out = tmp_path / "p"
    (out / "exponents.csv").mkdir(parents=True)  # forces the second write to fail
    rc = cli.run(["estimate", HAMMING, "--beta", "0.9", "--samples", "64", "--out-dir", str(out)])
    assert rc == cli.EXIT_INPUT
    assert not (out / "weights.csv").exists() and not (out / "manifest.json").exists()


def sweep(tmp_path, samples, name, grid="0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45"):
    path = tmp_path / name
    rc = cli.run(["sweep-beta", HAMMING, "--samples", samples, "--seed", "5", "--p-one-grid", grid,
                  "-o", str(path)])
    return rc, path


def test_sweep_tight_at_large_s(tmp_path):
    rc, path = sweep(tmp_path, "2^(k+4)", "big.csv")
    assert rc == 0
    rows = rows_of(path)
    assert len(rows) == 9 * 15
    dev = [abs(float(r["chi_star"]) - float(r["analytic_power"])) for r in rows]
    assert sum(d <= 5 / math.sqrt(256) for d in dev) >= 0.95 * len(dev)
    for r in rows:
        assert float(r["beta"]) == pytest.approx(1 - 2 * float(r["p_one"]))
        assert float(r["analytic_power"]) == pytest.approx(float(r["beta"]) ** int(r["weight"]))


def test_sweep_scatter_grows_at_small_s(tmp_path):
    _, big = sweep(tmp_path, "2^(k+4)", "big.csv")
    _, small = sweep(tmp_path, "2^k", "small.csv")

    def maxdev(p):
        return max(abs(float(r["chi_star"]) - float(r["analytic_power"])) for r in rows_of(p))

    assert maxdev(small) > maxdev(big)


def test_sweep_grid_edges(tmp_path, capsys):
    assert sweep(tmp_path, "2^k", "zero.csv", grid="0")[0] == cli.EXIT_USAGE
    assert not (tmp_path / "zero.csv").exists()
    rc, path = sweep(tmp_path, "2^k", "half.csv", grid="0.5")
    assert rc == 0 and "warning" in capsys.readouterr().err
    rows = rows_of(path)
    assert all(float(r["beta"]) == 0.0 for r in rows)


def test_convergence(tmp_path, capsys):
    path = tmp_path / "c.csv"
    assert cli.run(["convergence", HAMMING, "--beta", "-0.9", "--g-list", "2,0,-4",
                    "--repeats", "3", "--seed", "10", "-o", str(path)]) == 0
    rows = rows_of(path)
    assert [(r["g"], r["s"]) for r in rows[::3]] == [("2", "4"), ("0", "16"), ("-4", "256")]
    assert [r["cost_parity"] for r in rows] == ["0"] * 3 + ["1"] * 3 + ["0"] * 3
    assert [r["seed"] for r in rows[:3]] == ["10", "11", "12"]
    summary = rows_of(tmp_path / "c.summary.csv")
    assert [s["g"] for s in summary] == ["2", "0", "-4"]

    one = tmp_path / "one.csv"
    argv = ["convergence", HAMMING, "--beta", "-0.9", "--g-list", "1", "--repeats", "1",
            "-o", str(one)]
    assert cli.run(argv) == 0
    first = one.read_bytes()
    assert len(rows_of(one)) == 1
    assert cli.run(argv) == 0 and one.read_bytes() == first


def test_isd_demo(tmp_path, capsys):
    path = tmp_path / "isd.csv"
    assert cli.run(["isd-demo", "--n", "16", "--k", "8", "--t", "0", "--trials", "5",
                    "-o", str(path)]) == 0
    rows = rows_of(path)
    assert len(rows) == 10
    assert all(r["iterations"] == "1" and r["recovered_ok"] == "1" for r in rows)
    assert cli.run(["isd-demo", "--n", "20", "--k", "10", "--t", "2", "--trials", "10",
                    "-o", str(path)]) == 0
    assert all(r["success"] == "1" and r["recovered_ok"] == "1" for r in rows_of(path))


def test_isd_demo_exhausted_leaves_no_file(tmp_path):
    path = tmp_path / "x.csv"
    rc = cli.run(["isd-demo", "--n", "24", "--k", "12", "--t", "3", "--j-max", "0", "--isd-j", "0",
                  "--max-iterations", "1", "--trials", "20", "-o", str(path)])
    assert rc == cli.EXIT_EXHAUSTED
    assert not path.exists()
    assert cli.run(["isd-demo", "--n", "40", "--k", "10"]) == cli.EXIT_USAGE


def test_plot(tmp_path, capsys):
    _, s = sweep(tmp_path, "2^k", "s.csv", grid="0.1,0.3")
    c = tmp_path / "c.csv"
    cli.run(["convergence", HAMMING, "--beta", "0.9", "--g-list", "2,0", "--repeats", "2",
             "-o", str(c)])
    for src in (s, c, tmp_path / "c.summary.csv"):
        out = tmp_path / (src.stem + ".svg")
        assert cli.run(["plot", str(src), "-o", str(out)]) == 0
        assert out.read_text().lstrip().startswith("<?xml")
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert cli.run(["plot", str(empty), "-o", str(tmp_path / "e.svg")]) == cli.EXIT_INPUT
    header_only = tmp_path / "h.csv"
    header_only.write_text("g,s,seed,tvd,cost_parity\n")
    assert cli.run(["plot", str(header_only), "-o", str(tmp_path / "h.svg")]) == cli.EXIT_INPUT
    other = tmp_path / "o.csv"
    other.write_text("a,b\n1,2\n")
    assert cli.run(["plot", str(other), "-o", str(tmp_path / "o.svg")]) == cli.EXIT_INPUT
    assert not (tmp_path / "e.svg").exists() and not (tmp_path / "o.svg").exists()


def test_replay_byte_identical(tmp_path):
    est = tmp_path / "est"
    cli.run(["estimate", HAMMING, "--beta", "0.7", "--samples", "3000", "--batches", "4",
             "--out-dir", str(est)])
    before = {p.name: p.read_bytes() for p in est.glob("*.csv")}
    assert cli.run(["replay", str(est / "manifest.json")]) == 0
    assert {p.name: p.read_bytes() for p in est.glob("*.csv")} == before
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.run(["replay", str(bad)]) == cli.EXIT_INPUT
