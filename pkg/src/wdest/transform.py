"""Walsh-Hadamard transform over (F_2)^k in natural (Hadamard) order.

A spectrum is a plain numpy array of length 2^k indexed by the integer b whose
binary expansion is the vector b.  ``H[b, j] = (-1)^popcount(b & j)``.
"""

from __future__ import annotations

import numpy as np

from .errors import Malformed

# Tolerances used by the PMF / characteristic validators.
NORMALIZATION_TOL = 1e-9
NEGATIVITY_TOL = 1e-9


def spectrum_dim(v) -> int:
    """k for an array of length 2^k."""
    n = len(v)
    if n < 1 or n & (n - 1):
        raise ValueError(f"spectrum length {n} is not a power of two")
    return n.bit_length() - 1


def walsh(b: int, j: int, k: int) -> int:
    if not (0 <= b < 1 << k and 0 <= j < 1 << k):
        raise ValueError(f"indices ({b}, {j}) out of range for k={k}")
    return -1 if (b & j).bit_count() & 1 else 1


def fwht(v) -> np.ndarray:
    """H v by k butterfly passes; integer input stays integer (exact)."""
    a = np.array(v, copy=True)
    if a.dtype.kind not in "iuf":
        a = a.astype(np.float64)
    if a.dtype.kind == "u":
        a = a.astype(np.int64)
    k = spectrum_dim(a)
    n = a.shape[0]
    h = 1
    for _ in range(k):
        blk = a.reshape(n // (2 * h), 2, h)
        lo = blk[:, 0, :].copy()
        hi = blk[:, 1, :]
        blk[:, 0, :] += hi
        blk[:, 1, :] = lo - hi
        h *= 2
    return a


def pmf_to_characteristic(mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=np.float64)
    spectrum_dim(mu)
    total = mu.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL or mu.min() < -NEGATIVITY_TOL:
        raise Malformed(f"not a PMF (sum={total!r}, min={mu.min()!r})")
    return fwht(mu)


def characteristic_to_pmf(chi) -> np.ndarray:
    chi = np.asarray(chi, dtype=np.float64)
    k = spectrum_dim(chi)
    if abs(chi[0] - 1.0) > NORMALIZATION_TOL:
        raise Malformed(f"characteristic has chi(0) = {chi[0]!r}, expected 1")
    mu = fwht(chi) / float(1 << k)
    if mu.min() < -NEGATIVITY_TOL:
        raise Malformed(f"inverse transform has negative mass {mu.min()!r}")
    return mu
