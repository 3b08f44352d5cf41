"""Bit-packed linear algebra over GF(2).

Vectors are Python integers with an explicit length: bit ``j`` of the integer
is coordinate ``j`` of the vector, so the integer ``a = sum_j a_j 2^j`` and the
vector ``(a_0, ..., a_{len-1})`` are the same object.  Matrices are tuples of
such row integers.  Everything here is immutable; operations return new
values.

String forms list coordinate 0 first, e.g. ``BitWord.from_str("1000")`` is the
unit vector ``e_0`` (integer value 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import LengthMismatch, RankDeficient, Singular


@dataclass(frozen=True)
class BitWord:
    len: int
    bits: int = 0

    def __post_init__(self):
        if self.len < 0:
            raise ValueError("BitWord length must be non-negative")
        if self.bits < 0 or self.bits >> self.len:
            raise ValueError(f"bits {self.bits:#x} do not fit in {self.len} positions")

    @classmethod
    def zeros(cls, n: int) -> BitWord:
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> BitWord:
        return cls(n, (1 << n) - 1)

    @classmethod
    def unit(cls, n: int, i: int) -> BitWord:
        if not 0 <= i < n:
            raise IndexError(i)
        return cls(n, 1 << i)

    @classmethod
    def from_str(cls, s: str) -> BitWord:
        s = "".join(s.split())
        if set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(len(s), sum(1 << j for j, ch in enumerate(s) if ch == "1"))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitWord:
        bits = list(bits)
        return cls(len(bits), sum((int(b) & 1) << j for j, b in enumerate(bits)))

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> BitWord:
        v = 0
        for j in support:
            if not 0 <= j < n:
                raise IndexError(j)
            v |= 1 << j
        return cls(n, v)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.len:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __iter__(self) -> Iterator[int]:
        return (int((self.bits >> j) & 1) for j in range(self.len))

    def __len__(self) -> int:
        return self.len

    def _check(self, other: BitWord):
        if self.len != other.len:
            raise LengthMismatch(f"lengths {self.len} and {other.len}")

    def __xor__(self, other: BitWord) -> BitWord:
        self._check(other)
        return BitWord(self.len, self.bits ^ other.bits)

    def __and__(self, other: BitWord) -> BitWord:
        self._check(other)
        return BitWord(self.len, self.bits & other.bits)

    def __or__(self, other: BitWord) -> BitWord:
        self._check(other)
        return BitWord(self.len, self.bits | other.bits)

    def support(self) -> list[int]:
        return [j for j in range(self.len) if (self.bits >> j) & 1]

    def select(self, idx: Sequence[int]) -> BitWord:
        """Coordinates ``idx`` (in the given order) as a new word."""
        return BitWord.from_bits(self[j] for j in idx)

    def to_str(self) -> str:
        return "".join(str(b) for b in self)

    def __str__(self) -> str:
        return self.to_str()


def weight(v: BitWord) -> int:
    return v.bits.bit_count()


def dot(u: BitWord, v: BitWord) -> int:
    """Inner product over GF(2)."""
    u._check(v)
    return (u.bits & v.bits).bit_count() & 1


@dataclass(frozen=True)
class BinaryMatrix:
    """Dense matrix over GF(2); ``data[i]`` holds row ``i`` as a bit integer."""

    nrows: int
    ncols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.nrows:
            raise ValueError(f"expected {self.nrows} rows, got {len(self.data)}")
        for r in self.data:
            if r < 0 or r >> self.ncols:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence, ncols: int | None = None) -> BinaryMatrix:
        """Build from BitWords, bit strings, or 0/1 sequences."""
        ints = []
        widths = set()
        for r in rows:
            if isinstance(r, str):
                r = BitWord.from_str(r)
            elif not isinstance(r, BitWord):
                r = BitWord.from_bits(r)
            widths.add(r.len)
            ints.append(r.bits)
        if ncols is None:
            if len(widths) > 1:
                raise LengthMismatch(f"rows of unequal length {sorted(widths)}")
            ncols = widths.pop() if widths else 0
        elif widths - {ncols}:
            raise LengthMismatch(f"rows of length {sorted(widths)} but ncols={ncols}")
        return cls(len(ints), ncols, tuple(ints))

    @classmethod
    def from_array(cls, a) -> BinaryMatrix:
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls.from_rows([[int(x) & 1 for x in row] for row in a], ncols=a.shape[1])

    @classmethod
    def identity(cls, k: int) -> BinaryMatrix:
        return cls(k, k, tuple(1 << i for i in range(k)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BinaryMatrix:
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> BinaryMatrix:
        """Matrix P with ``(x P)[c] = x[perm[c]]``, i.e. ``P[perm[c], c] = 1``."""
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise ValueError("not a permutation")
        rows = [0] * n
        for c, src in enumerate(perm):
            rows[src] |= 1 << c
        return cls(n, n, tuple(rows))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def row(self, i: int) -> BitWord:
        return BitWord(self.ncols, self.data[i])

    def rows(self) -> list[BitWord]:
        return [BitWord(self.ncols, r) for r in self.data]

    def column(self, j: int) -> BitWord:
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        return BitWord(self.nrows, self.column_int(j))

    def column_int(self, j: int) -> int:
        """Column ``j`` as an integer, bit ``i`` = entry ``(i, j)``."""
        return sum(((r >> j) & 1) << i for i, r in enumerate(self.data))

    def column_ints(self) -> list[int]:
        return [self.column_int(j) for j in range(self.ncols)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        return (self.data[i] >> j) & 1

    def transpose(self) -> BinaryMatrix:
        return BinaryMatrix(self.ncols, self.nrows, tuple(self.column_ints()))

    @property
    def T(self) -> BinaryMatrix:
        return self.transpose()

    def __matmul__(self, other: BinaryMatrix) -> BinaryMatrix:
        return multiply(self, other)

    def hstack(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.nrows != other.nrows:
            raise LengthMismatch("row counts differ")
        return BinaryMatrix(
            self.nrows,
            self.ncols + other.ncols,
            tuple(a | (b << self.ncols) for a, b in zip(self.data, other.data)),
        )

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.data):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def to_strs(self) -> list[str]:
        return [w.to_str() for w in self.rows()]


def multiply(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    if a.ncols != b.nrows:
        raise LengthMismatch(f"cannot multiply {a.shape} by {b.shape}")
    out = []
    for r in a.data:
        acc = 0
        l = 0
        while r:
            if r & 1:
                acc ^= b.data[l]
            r >>= 1
            l += 1
        out.append(acc)
    return BinaryMatrix(a.nrows, b.ncols, tuple(out))


def compress(G: BinaryMatrix, x: BitWord) -> BitWord:
    """y = G x: bit ``i`` of y is the inner product of row ``i`` with x."""
    if x.len != G.ncols:
        raise LengthMismatch(f"word of length {x.len} for {G.shape} matrix")
    return BitWord(G.nrows, sum(((r & x.bits).bit_count() & 1) << i for i, r in enumerate(G.data)))


def encode(m: BitWord, G: BinaryMatrix) -> BitWord:
    """c = m^T G, the XOR of the rows of G picked out by the 1-bits of m."""
    if m.len != G.nrows:
        raise LengthMismatch(f"message of length {m.len} for {G.shape} matrix")
    acc = 0
    for i, r in enumerate(G.data):
        if (m.bits >> i) & 1:
            acc ^= r
    return BitWord(G.ncols, acc)


def _rref(rows: list[int], pivot_cols: Iterable[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of ``rows`` in place.

    Columns are tried in the order given; for each, the lowest-index row at or
    below the current pivot row with a 1 becomes the pivot.
    """
    pivots = []
    r = 0
    m = len(rows)
    for c in pivot_cols:
        if r == m:
            break
        bit = 1 << c
        p = next((i for i in range(r, m) if rows[i] & bit), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= pv
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(M: BinaryMatrix) -> int:
    _, pivots = _rref(list(M.data), range(M.ncols))
    return len(pivots)


def row_reduce(M: BinaryMatrix) -> tuple[BinaryMatrix, list[int]]:
    """Reduced row echelon form and its pivot columns."""
    rows, pivots = _rref(list(M.data), range(M.ncols))
    return BinaryMatrix(M.nrows, M.ncols, tuple(rows)), pivots


def invert(M: BinaryMatrix) -> BinaryMatrix:
    k = M.nrows
    if M.ncols != k:
        raise LengthMismatch(f"cannot invert non-square {M.shape} matrix")
    aug = [r | (1 << (k + i)) for i, r in enumerate(M.data)]
    aug, pivots = _rref(aug, range(k))
    if len(pivots) < k:
        raise Singular(f"matrix has rank {len(pivots)} < {k}")
    return BinaryMatrix(k, k, tuple(r >> k for r in aug))


def submatrix_columns(M: BinaryMatrix, idx: Sequence[int]) -> BinaryMatrix:
    idx = list(idx)
    for j in idx:
        if not 0 <= j < M.ncols:
            raise IndexError(f"column {j} out of range for {M.shape} matrix")
    rows = []
    for r in M.data:
        rows.append(sum(((r >> j) & 1) << c for c, j in enumerate(idx)))
    return BinaryMatrix(M.nrows, len(idx), tuple(rows))


def to_systematic(G: BinaryMatrix) -> tuple[BinaryMatrix, tuple[int, ...]]:
    """Find ``perm`` and ``Gs`` with ``rowreduce(G[:, perm]) = (Gs | I_k)``.

    ``perm[c]`` is the original index of permuted column ``c``.  If the last
    k columns of G are already an information set they are kept in place
    (identity permutation); otherwise pivot columns are found greedily left
    to right and moved to the back.
    """
    k, n = G.shape
    if k > n:
        raise RankDeficient(f"{k} rows cannot be independent in {n} columns")
    trailing = list(range(n - k, n))
    rows, pivots = _rref(list(G.data), trailing)
    if len(pivots) == k:
        perm = tuple(range(n))
    else:
        rows, pivots = _rref(list(G.data), range(n))
        if len(pivots) < k:
            raise RankDeficient(f"generator has rank {len(pivots)} < {k}")
        pset = set(pivots)
        perm = tuple([c for c in range(n) if c not in pset] + pivots)
    # After reduction row i carries the unit at column pivots[i].
    reduced = BinaryMatrix(k, n, tuple(rows))
    gs = submatrix_columns(reduced, perm[: n - k])
    return gs, perm


def systematic_generator(G: BinaryMatrix) -> tuple[BinaryMatrix, tuple[int, ...]]:
    """The full ``(Gs | I_k)`` matrix together with its column permutation."""
    gs, perm = to_systematic(G)
    return gs.hstack(BinaryMatrix.identity(G.nrows)), perm


def packed_rows(M: BinaryMatrix) -> np.ndarray:
    """Rows as a ``(nrows, ceil(ncols/64))`` uint64 array, little-endian words."""
    nw = max(1, -(-M.ncols // 64))
    out = np.zeros((M.nrows, nw), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, r in enumerate(M.data):
        for w in range(nw):
            out[i, w] = (r >> (64 * w)) & mask
    return out
