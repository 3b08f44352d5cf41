"""SVG renderings of sweep and convergence CSVs."""

from __future__ import annotations

import csv
import io
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ParseError  # noqa: E402

SWEEP_COLUMNS = ["p_one", "beta", "b", "chi_star", "analytic_power", "weight"]
CONVERGENCE_COLUMNS = ["g", "s", "seed", "tvd", "cost_parity"]
SUMMARY_COLUMNS = ["g", "median_tvd"]


def read_csv(text: str) -> tuple[list[str], list[dict[str, str]]]:
    reader = csv.DictReader(io.StringIO(text))
    rows = list(reader)
    return list(reader.fieldnames or []), rows


def detect_kind(header: list[str]) -> str:
    if header == SWEEP_COLUMNS:
        return "sweep"
    if header == CONVERGENCE_COLUMNS:
        return "convergence"
    if header == SUMMARY_COLUMNS:
        return "summary"
    raise ParseError(f"unknown CSV schema {header}")


def _svg(fig, timestamp: str | None) -> bytes:
    buf = io.BytesIO()
    with plt.rc_context({"svg.hashsalt": "wdest", "svg.fonttype": "none"}):
        fig.savefig(buf, format="svg", metadata={"Date": timestamp, "Creator": "wdest"})
    plt.close(fig)
    return buf.getvalue()


def plot_sweep(rows: list[dict[str, str]], timestamp: str | None = None) -> bytes:
    """chi* against P(1), with beta^l curves for every weight present."""
    p = np.array([float(r["p_one"]) for r in rows])
    chi = np.array([float(r["chi_star"]) for r in rows])
    weights = sorted({int(r["weight"]) for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(p, chi, s=8, color="tab:blue", label=r"$\hat\chi^*(b)$", zorder=3)
    grid = np.linspace(0.0, 1.0, 201)
    beta = 1 - 2 * grid
    for l in weights:
        ax.plot(grid, beta ** l, lw=0.8, color="0.5")
    ax.set_xlim(max(0.0, p.min() - 0.02), min(1.0, p.max() + 0.02))
    ax.set_xlabel("P(1)")
    ax.set_ylabel(r"$\chi^*$")
    ax.set_title(r"estimated characteristic vs. powers of $\beta$")
    ax.legend(loc="best")
    return _svg(fig, timestamp)


def _medians(rows: list[dict[str, str]], key: str) -> tuple[np.ndarray, np.ndarray]:
    groups = defaultdict(list)
    for r in rows:
        groups[int(r["g"])].append(float(r[key]))
    g = np.array(sorted(groups))
    return g, np.array([np.median(groups[v]) for v in g])


def plot_convergence(rows: list[dict[str, str]], kind: str, timestamp: str | None = None) -> bytes:
    key = "tvd" if kind == "convergence" else "median_tvd"
    g, med = _medians(rows, key)
    fig, ax = plt.subplots(figsize=(6, 4))
    if kind == "convergence":
        raw_g = np.array([int(r["g"]) for r in rows])
        raw_t = np.array([float(r["tvd"]) for r in rows])
        ax.scatter(raw_g, raw_t, s=6, color="0.6", label="per seed")
    ax.plot(g, med, marker="o", color="tab:red", label="median TVD")
    ax.axvline(0, ls=":", color="k", lw=0.8)
    ax.set_xlabel(r"g  (s = $2^{k-g}$)")
    ax.set_ylabel("TVD")
    ax.invert_xaxis()
    ax.legend(loc="best")
    return _svg(fig, timestamp)


def render(text: str, kind: str | None = None, timestamp: str | None = None) -> bytes:
    header, rows = read_csv(text)
    if not header:
        raise ParseError("empty CSV")
    detected = detect_kind(header)
    if kind is not None and kind != detected and not (kind == "convergence" and detected == "summary"):
        raise ParseError(f"CSV looks like {detected!r}, not {kind!r}")
    if not rows:
        raise ParseError("CSV has no data rows; nothing to plot")
    if detected == "sweep":
        return plot_sweep(rows, timestamp)
    return plot_convergence(rows, detected, timestamp)
