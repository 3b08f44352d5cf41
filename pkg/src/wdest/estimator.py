"""Weight-distribution estimation from compressed biased bit streams.

Pipeline: draw s words x of n bits with balance beta, compress y = Gx,
histogram y over (F_2)^k, Walsh-transform the histogram into an estimate of
chi_Y, and read off log_eps |chi_Y(b)| as the weight of codeword bG.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import gf2
from .code import DEFAULT_CAP, LinearCode, enumerate_weights
from .errors import CapExceeded, LengthMismatch
from .rng import BalanceSpec, substream
from .transform import fwht

ROUNDING_RULES = ("half-even",)
SAMPLERS = ("direct", "systematic")
# Samples drawn per vectorized step; does not affect results.
CHUNK = 1 << 15


@dataclass(frozen=True)
class EstimationConfig:
    samples: int
    bal: BalanceSpec
    seed: int = 0
    batches: int = 1
    rounding: str = "half-even"
    sampler: str = "direct"
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.batches < 1:
            raise ValueError("batches must be >= 1")
        if self.rounding not in ROUNDING_RULES:
            raise ValueError(f"unknown rounding rule {self.rounding!r}")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}")


@dataclass(frozen=True)
class EstimationReport:
    a_hat: np.ndarray
    exponents: np.ndarray  # index b - 1, inf where unresolved
    rounded: np.ndarray  # index b - 1, -1 where unresolved
    unresolved: int
    chi_hat: np.ndarray
    tvd_vs_exact: float | None = None
    exact: np.ndarray | None = None

    @property
    def chi_star(self) -> np.ndarray:
        return self.chi_hat[1:]


def batch_sizes(samples: int, batches: int) -> list[int]:
    q, r = divmod(samples, batches)
    return [q + (1 if i < r else 0) for i in range(batches)]


def _column_ints(M: gf2.BinaryMatrix) -> np.ndarray:
    return np.array(M.column_ints(), dtype=np.int64)


def _direct_chunks(code: LinearCode, cfg: EstimationConfig, batch: int, size: int) -> Iterator[np.ndarray]:
    gamma = _column_ints(code.G)
    src = substream(cfg.seed, batch)
    n = code.n
    done = 0
    while done < size:
        m = min(CHUNK, size - done)
        x = src.bits(cfg.bal, m * n).reshape(m, n)
        y = np.zeros(m, dtype=np.int64)
        for j in range(n):
            y ^= np.where(x[:, j] == 1, gamma[j], 0)
        yield y
        done += m


def _systematic_chunks(gs: gf2.BinaryMatrix, n: int, cfg: EstimationConfig, batch: int,
                       size: int) -> Iterator[np.ndarray]:
    # Y(j) = X(n-k+j) xor sum_i Gs[j, i] X(i): n-k column XORs plus one packing step.
    k, r = gs.nrows, gs.ncols
    gamma = _column_ints(gs)
    place = (1 << np.arange(k, dtype=np.int64))
    src = substream(cfg.seed, batch)
    done = 0
    while done < size:
        m = min(CHUNK, size - done)
        x = src.bits(cfg.bal, m * n).reshape(m, n)
        y = x[:, r:].astype(np.int64) @ place
        for i in range(r):
            y ^= np.where(x[:, i] == 1, gamma[i], 0)
        yield y
        done += m


def _batch_counts(chunks: Iterator[np.ndarray], k: int) -> np.ndarray:
    counts = np.zeros(1 << k, dtype=np.int64)
    for y in chunks:
        counts += np.bincount(y, minlength=1 << k)
    return counts


def _merged_counts(make_chunks, k: int, cfg: EstimationConfig, workers: int) -> np.ndarray:
    sizes = batch_sizes(cfg.samples, cfg.batches)
    jobs = [(b, sz) for b, sz in enumerate(sizes) if sz]

    def run(job):
        return _batch_counts(make_chunks(*job), k)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return np.sum(parts, axis=0, dtype=np.int64)


def _check_k(code: LinearCode, cfg: EstimationConfig):
    if code.k > cfg.cap:
        raise CapExceeded(f"k = {code.k} exceeds the spectrum cap {cfg.cap}")


def sample_counts(code: LinearCode, cfg: EstimationConfig, workers: int = 1) -> np.ndarray:
    """Histogram of y = Gx over s samples; deterministic in (seed, batches)."""
    _check_k(code, cfg)
    return _merged_counts(lambda b, sz: _direct_chunks(code, cfg, b, sz), code.k, cfg, workers)


def sample_pmf(code: LinearCode, cfg: EstimationConfig, workers: int = 1) -> np.ndarray:
    return sample_counts(code, cfg, workers) / cfg.samples


def sample_words(code: LinearCode, cfg: EstimationConfig) -> np.ndarray:
    """The compressed samples themselves, batch by batch."""
    _check_k(code, cfg)
    out = [y for b, sz in enumerate(batch_sizes(cfg.samples, cfg.batches))
           for y in _direct_chunks(code, cfg, b, sz)]
    return np.concatenate(out)


def systematic_code(code: LinearCode) -> tuple[LinearCode, tuple[int, ...]]:
    """The equivalent code generated by ``(Gs | I_k)`` and its column permutation."""
    G, perm = gf2.systematic_generator(code.G)
    return LinearCode(G, d=code.d), perm


def systematic_counts(code: LinearCode, cfg: EstimationConfig, workers: int = 1) -> np.ndarray:
    _check_k(code, cfg)
    gs, _ = gf2.to_systematic(code.G)
    return _merged_counts(lambda b, sz: _systematic_chunks(gs, code.n, cfg, b, sz),
                          code.k, cfg, workers)


def fast_sample_systematic(code: LinearCode, cfg: EstimationConfig, workers: int = 1) -> np.ndarray:
    """Empirical PMF of y = (Gs | I_k) x, indexed in the systematic basis."""
    return systematic_counts(code, cfg, workers) / cfg.samples


def characteristic_from_counts(counts: np.ndarray, samples: int) -> np.ndarray:
    # Integer transform keeps chi_hat(b) == 0 exact.
    return fwht(np.asarray(counts, dtype=np.int64)) / samples


def estimate_exponents(chi_hat, bal: BalanceSpec) -> np.ndarray:
    """log_eps |chi*(b)| for b = 1..2^k-1; +inf where chi*(b) is exactly zero."""
    chi = np.asarray(chi_hat, dtype=np.float64)
    # chi* = chi - chi_uniform only differs at b = 0, which is dropped.
    mag = np.abs(chi[1:])
    out = np.full(mag.shape, np.inf)
    ok = mag > 0
    out[ok] = np.log(mag[ok]) / np.log(bal.epsilon)
    return out


def round_and_tally(exponents, n: int, k: int) -> tuple[np.ndarray, np.ndarray, int]:
    e = np.asarray(exponents, dtype=np.float64)
    if e.shape != ((1 << k) - 1,):
        raise LengthMismatch(f"expected {(1 << k) - 1} exponents, got {e.shape}")
    resolved = np.isfinite(e)
    rounded = np.full(e.shape, -1, dtype=np.int64)
    rounded[resolved] = np.clip(np.rint(e[resolved]), 1, n).astype(np.int64)
    a_hat = np.bincount(rounded[resolved], minlength=n + 1).astype(np.int64)
    a_hat[0] = 1
    return a_hat, rounded, int((~resolved).sum())


def tvd(a, b_hat, k: int) -> float:
    """Total variation distance between A/2^k and A_hat/2^k over weights 0..n."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b_hat, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"weight distributions of shape {a.shape} and {b.shape}")
    return float(0.5 * np.abs(a - b).sum() / 2.0 ** k)


def variance_bound(bal, w: int) -> float:
    """Var((-1)^{b.Y}) = 1 - beta^{2w} for a codeword of weight w."""
    beta = bal.beta if isinstance(bal, BalanceSpec) else float(bal)
    if w < 0:
        raise ValueError("weight must be non-negative")
    return 1.0 - beta ** (2 * w)


def report_from_characteristic(code: LinearCode, chi_hat: np.ndarray, bal: BalanceSpec,
                               cap: int = DEFAULT_CAP) -> EstimationReport:
    exps = estimate_exponents(chi_hat, bal)
    a_hat, rounded, unresolved = round_and_tally(exps, code.n, code.k)
    exact = tv = None
    if code.k <= cap:
        exact = enumerate_weights(code, cap)
        tv = tvd(exact, a_hat, code.k)
    return EstimationReport(a_hat, exps, rounded, unresolved, chi_hat, tv, exact)


def estimate_weight_distribution(code: LinearCode, cfg: EstimationConfig,
                                 workers: int = 1) -> EstimationReport:
    if cfg.sampler == "systematic":
        counts = systematic_counts(code, cfg, workers)
    else:
        counts = sample_counts(code, cfg, workers)
    chi_hat = characteristic_from_counts(counts, cfg.samples)
    return report_from_characteristic(code, chi_hat, cfg.bal, cfg.cap)
