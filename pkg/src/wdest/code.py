"""Binary linear codes and their exact weight oracles.

Matrix text format: UTF-8, ``#`` starts a comment running to end of line,
every non-blank line is one row of ``0``/``1`` characters (whitespace inside
a row is ignored), all rows have the same length n, and the number of rows
is k.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gf2
from .errors import CapExceeded, LengthMismatch, ParseError, Ragged, RankDeficient
from .gf2 import BinaryMatrix, BitWord
from .rng import BalanceSpec, BitSource
from .transform import characteristic_to_pmf

DEFAULT_CAP = 24

# Generator polynomials, bit i = coefficient of x^i.
HAMMING74_POLY = 0b1011  # x^3 + x + 1
# Narrow-sense BCH of length 33 with roots alpha^1..alpha^4, alpha of order 33
# in GF(2^10): product of the minimal polynomials of alpha and alpha^3.
# Designed distance 5; the true minimum distance is 10.
BCH_33_13_POLY = 0x10F5E1


@dataclass(frozen=True)
class LinearCode:
    G: BinaryMatrix
    d: int | None = None

    def __post_init__(self):
        k, n = self.G.shape
        if k < 1 or n < k:
            raise RankDeficient(f"need n >= k >= 1, got {self.G.shape}")
        r = gf2.rank(self.G)
        if r != k:
            raise RankDeficient(f"generator has rank {r} < k = {k}")

    @property
    def n(self) -> int:
        return self.G.ncols

    @property
    def k(self) -> int:
        return self.G.nrows

    @property
    def t(self) -> int | None:
        return None if self.d is None else (self.d - 1) // 2

    def __repr__(self):
        d = "" if self.d is None else f",{self.d}"
        return f"LinearCode[{self.n},{self.k}{d}]"


def parse_matrix(text: str) -> BinaryMatrix:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        line = "".join(line.split())
        if not line:
            continue
        bad = set(line) - {"0", "1"}
        if bad:
            raise ParseError(f"line {lineno}: unexpected characters {''.join(sorted(bad))!r}")
        rows.append(line)
    if not rows:
        raise ParseError("no matrix rows found")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise Ragged(f"rows have unequal lengths {sorted(widths)}")
    return BinaryMatrix.from_rows(rows)


def load_generator(text: str) -> LinearCode:
    return LinearCode(parse_matrix(text))


def load_generator_file(path) -> LinearCode:
    return load_generator(Path(path).read_text(encoding="utf-8"))


def format_matrix(M: BinaryMatrix, comment: str | None = None) -> str:
    head = "".join(f"# {line}\n" for line in comment.splitlines()) if comment else ""
    return head + "".join(r + "\n" for r in M.to_strs())


def cyclic_generator(poly, n: int, d: int | None = None) -> LinearCode:
    """Code whose row i is ``poly`` shifted by i; k = n - deg(poly).

    ``poly`` is an int (bit i = coefficient of x^i, so ``0b1011`` is
    x^3 + x + 1) or a BitWord with the same bit convention.
    """
    p = poly.bits if isinstance(poly, BitWord) else int(poly)
    if p <= 0:
        raise ValueError("polynomial must be nonzero")
    deg = p.bit_length() - 1
    if deg >= n:
        raise ValueError(f"degree {deg} must be below n = {n}")
    if not p & 1:
        raise ValueError("polynomial must have a nonzero constant term")
    k = n - deg
    return LinearCode(BinaryMatrix(k, n, tuple(p << i for i in range(k))), d=d)


def hamming74() -> LinearCode:
    return cyclic_generator(HAMMING74_POLY, 7, d=3)


def bch_33_13() -> LinearCode:
    return cyclic_generator(BCH_33_13_POLY, 33, d=10)


def random_code(n: int, k: int, src: BitSource, min_distance: int | None = None,
                max_tries: int = 10_000) -> LinearCode:
    """Uniformly random full-rank k x n generator, optionally rejection-sampled on d."""
    for _ in range(max_tries):
        rows = tuple(BitWord.from_bits(src.raw(n) >> np.uint64(63)).bits for _ in range(k))
        G = BinaryMatrix(k, n, rows)
        if gf2.rank(G) < k:
            continue
        code = LinearCode(G)
        if min_distance is None:
            return code
        d = minimum_distance(code)
        if d >= min_distance:
            return LinearCode(G, d=d)
    raise RankDeficient(f"no [{n},{k}] code with d >= {min_distance} in {max_tries} tries")


def random_double_circulant_code(k: int, src: BitSource, min_distance: int | None = None,
                                 max_tries: int = 10_000) -> LinearCode:
    """Random ``(I_k | A)`` code with A circulant; n = 2k.

    Double-circulant codes reach d >= 5 at n = 16, 20 far more often than
    uniformly random codes do, which makes them the practical source of
    uniquely decodable toy instances.
    """
    mask = (1 << k) - 1
    for _ in range(max_tries):
        a = int(src.raw(1)[0]) & mask
        rows = tuple((1 << i) | ((((a << i) | (a >> (k - i))) & mask) << k) for i in range(k))
        code = LinearCode(BinaryMatrix(k, 2 * k, rows))
        if min_distance is None:
            return code
        d = minimum_distance(code)
        if d >= min_distance:
            return LinearCode(code.G, d=d)
    raise RankDeficient(f"no double-circulant [{2 * k},{k}] code with d >= {min_distance}")


def _check_cap(code: LinearCode, cap: int):
    if code.k > cap:
        raise CapExceeded(f"k = {code.k} exceeds the enumeration cap {cap}")


def _popcount_rows(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def _gray_span(rows: np.ndarray) -> np.ndarray:
    """All 2^r combinations of ``rows`` in Gray-code order, one XOR per step."""
    r = rows.shape[0]
    out = np.zeros((1 << r, rows.shape[1]), dtype=np.uint64)
    if r:
        i = np.arange(1, 1 << r, dtype=np.int64)
        ctz = np.log2(i & -i).astype(np.int64)
        out[1:] = np.bitwise_xor.accumulate(rows[ctz], axis=0)
    return out


def enumerate_weights(code: LinearCode, cap: int = DEFAULT_CAP, block: int = 16) -> np.ndarray:
    """Exact weight distribution A_0..A_n by Gray-code enumeration of 2^k messages.

    The low ``block`` rows are spanned once as a vector; the remaining rows are
    walked in Gray order, each step XOR-ing one row into every low-span word.
    """
    _check_cap(code, cap)
    rows = gf2.packed_rows(code.G)
    b = min(code.k, block)
    low = _gray_span(rows[:b])
    high = rows[b:]
    hist = np.zeros(code.n + 1, dtype=np.int64)
    offset = np.zeros(rows.shape[1], dtype=np.uint64)
    for i in range(1 << (code.k - b)):
        if i:
            offset = offset ^ high[(i & -i).bit_length() - 1]
        hist += np.bincount(_popcount_rows(low ^ offset), minlength=code.n + 1)
    return hist


def codeword_weights(code: LinearCode, cap: int = DEFAULT_CAP) -> np.ndarray:
    """``weight(encode(b, G))`` for every message index b in natural order."""
    _check_cap(code, cap)
    rows = gf2.packed_rows(code.G)
    words = np.zeros((1 << code.k, rows.shape[1]), dtype=np.uint64)
    for i in range(code.k):
        h = 1 << i
        words[h:2 * h] = words[:h] ^ rows[i]
    return _popcount_rows(words)


def beta_powers(beta: float, n: int) -> np.ndarray:
    """beta^0..beta^n by repeated multiplication."""
    p = np.empty(n + 1, dtype=np.float64)
    acc = 1.0
    for l in range(n + 1):
        p[l] = acc
        acc *= beta
    return p


def _beta(bal) -> float:
    return bal.beta if isinstance(bal, BalanceSpec) else float(bal)


def analytic_characteristic(code: LinearCode, bal, cap: int = DEFAULT_CAP) -> np.ndarray:
    """chi_Y(b) = beta^weight(bG); ``bal`` may be a BalanceSpec or a raw beta in [-1, 1]."""
    beta = _beta(bal)
    if not -1.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [-1, 1], got {beta}")
    return beta_powers(beta, code.n)[codeword_weights(code, cap)]


def analytic_pmf(code: LinearCode, bal, cap: int = DEFAULT_CAP) -> np.ndarray:
    return characteristic_to_pmf(analytic_characteristic(code, bal, cap))


def minimum_distance(code: LinearCode, cap: int = DEFAULT_CAP) -> int:
    A = enumerate_weights(code, cap)
    nz = np.flatnonzero(A[1:])
    return int(nz[0]) + 1


def parity_check(code: LinearCode) -> BinaryMatrix:
    """An (n-k) x n matrix H of full rank with G H^T = 0."""
    gs, perm = gf2.to_systematic(code.G)
    n, k = code.n, code.k
    # (Gs | I_k) is orthogonal to (I_{n-k} | Gs^T) in permuted coordinates.
    hp = BinaryMatrix.identity(n - k).hstack(gs.transpose())
    rows = []
    for r in hp.data:
        acc = 0
        for c in range(n):
            if (r >> c) & 1:
                acc |= 1 << perm[c]
        rows.append(acc)
    return BinaryMatrix(n - k, n, tuple(rows))


def nearest_codeword(code: LinearCode, word: BitWord, cap: int = DEFAULT_CAP) -> BitWord:
    """Message whose codeword is closest to ``word``; lowest index wins ties."""
    _check_cap(code, cap)
    if word.len != code.n:
        raise LengthMismatch(f"word of length {word.len} for n = {code.n}")
    rows = gf2.packed_rows(code.G)
    target = gf2.packed_rows(BinaryMatrix(1, code.n, (word.bits,)))[0]
    words = np.zeros((1 << code.k, rows.shape[1]), dtype=np.uint64)
    for i in range(code.k):
        h = 1 << i
        words[h:2 * h] = words[:h] ^ rows[i]
    dist = _popcount_rows(words ^ target)
    return BitWord(code.k, int(np.argmin(dist)))
