"""Information set decoding on toy instances.

Lee-Brickell against a McEliece public key, the same idea phrased on a parity
check matrix, and a small McEliece implementation to generate targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from . import gf2
from .code import LinearCode, nearest_codeword
from .errors import IterationsExhausted, Singular
from .gf2 import BinaryMatrix, BitWord
from .rng import BitSource


@dataclass(frozen=True)
class IsdConfig:
    j_max: int = 2
    max_iterations: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.j_max < 0:
            raise ValueError("j_max must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class McElieceKey:
    code: LinearCode
    S: BinaryMatrix
    P: BinaryMatrix
    perm: tuple[int, ...]
    Gamma: BinaryMatrix
    t: int

    @property
    def public(self) -> tuple[BinaryMatrix, int]:
        return self.Gamma, self.t


@dataclass(frozen=True)
class LeeBrickellResult:
    message: BitWord
    error: BitWord
    iterations: int  # invertible index sets examined
    draws: int  # index sets drawn, singular ones included
    index_set: tuple[int, ...]


@dataclass(frozen=True)
class IsdResult:
    support: tuple[int, ...]
    iterations: int
    draws: int


def _check_index_set(idx: Sequence[int], n: int, k: int):
    if len(idx) != k or len(set(idx)) != k or any(not 0 <= i < n for i in idx):
        raise ValueError(f"need {k} distinct indices in [0, {n}), got {list(idx)}")


def is_information_set(H: BinaryMatrix, idx: Sequence[int]) -> bool:
    """True iff the n-k columns of H outside ``idx`` are invertible."""
    r, n = H.shape
    _check_index_set(idx, n, n - r)
    chosen = set(idx)
    rest = [c for c in range(n) if c not in chosen]
    return gf2.rank(gf2.submatrix_columns(H, rest)) == r


def random_index_set(n: int, k: int, src: BitSource) -> tuple[int, ...]:
    return tuple(src.sample_indices(n, k))


def mceliece_keygen(code: LinearCode, t: int, seed: int, S: BinaryMatrix | None = None,
                    perm: Sequence[int] | None = None) -> McElieceKey:
    """Gamma = S G P with S random invertible and P a random permutation.

    ``S`` and ``perm`` override the random draws (test hook).
    """
    src = BitSource(seed, 0)
    k, n = code.k, code.n
    if S is None:
        while True:
            S = BinaryMatrix(k, k, tuple(BitWord.from_bits(src.raw(k) >> 63).bits for _ in range(k)))
            if gf2.rank(S) == k:
                break
    elif gf2.rank(S) != k:
        raise Singular("scrambler S must be invertible")
    if perm is None:
        perm = src.permutation(n)
    P = BinaryMatrix.permutation(perm)
    Gamma = S @ code.G @ P
    return McElieceKey(code, S, P, tuple(perm), Gamma, t)


def random_error(n: int, t: int, src: BitSource) -> BitWord:
    return BitWord.from_support(n, random_index_set(n, t, src))


def encrypt(m: BitWord, Gamma: BinaryMatrix, t: int, src: BitSource) -> BitWord:
    return gf2.encode(m, Gamma) ^ random_error(Gamma.ncols, t, src)


def mceliece_decrypt(key: McElieceKey, mu: BitWord) -> BitWord:
    """Undo P, decode by exhaustive nearest-codeword search, undo S."""
    # (x P)[c] = x[perm[c]], so x = mu P^-1 has x[perm[c]] = mu[c].
    unperm = BitWord.from_support(mu.len, (key.perm[c] for c in mu.support()))
    ms = nearest_codeword(key.code, unperm)
    return gf2.encode(ms, gf2.invert(key.S))


def _words_of_weight(k: int, j: int):
    """Weight-j masks over k positions, lexicographic in the support."""
    for supp in combinations(range(k), j):
        v = 0
        for i in supp:
            v |= 1 << i
        yield v


def lee_brickell(Gamma: BinaryMatrix, mu: BitWord, t: int, cfg: IsdConfig) -> LeeBrickellResult:
    """Find m with weight(mu + m Gamma) <= t.

    Each iteration draws a k-subset i of positions; if Gamma restricted to i is
    invertible, every perturbation e of weight <= j_max of mu on i yields the
    codeword (mu(i) + e) Gamma_i^-1 Gamma, accepted when within distance t of mu.
    """
    k, n = Gamma.shape
    src = BitSource(cfg.seed, 1)
    examined = 0
    for draw in range(1, cfg.max_iterations + 1):
        idx = random_index_set(n, k, src)
        try:
            inv = gf2.invert(gf2.submatrix_columns(Gamma, idx))
        except Singular:
            continue
        examined += 1
        gp = inv @ Gamma
        mu_i = mu.select(idx)
        for j in range(min(cfg.j_max, k) + 1):
            for e in _words_of_weight(k, j):
                u = BitWord(k, mu_i.bits ^ e)
                err = mu ^ gf2.encode(u, gp)
                if gf2.weight(err) <= t:
                    return LeeBrickellResult(gf2.encode(u, inv), err, examined, draw, idx)
    raise IterationsExhausted(f"no solution within {cfg.max_iterations} draws")


def lee_brickell_isd(H: BinaryMatrix, x: BitWord, eta: int, j: int, cfg: IsdConfig) -> IsdResult:
    """Find a set E of eta columns of H summing to the syndrome H x.

    Each iteration draws a permutation of the columns and row-reduces so the
    last n-k permuted columns become the identity; size-j subsets of the
    first k columns are then tried, completing with the identity columns that
    the residual syndrome selects.
    """
    r, n = H.shape
    k = n - r
    if not 0 <= j <= eta:
        raise ValueError(f"need 0 <= j <= eta, got j={j}, eta={eta}")
    src = BitSource(cfg.seed, 2)
    syn = gf2.compress(H, x).bits
    examined = 0
    for draw in range(1, cfg.max_iterations + 1):
        perm = src.permutation(n)
        try:
            ug = gf2.invert(gf2.submatrix_columns(H, perm[k:]))
        except Singular:
            continue
        examined += 1
        Z = ug @ gf2.submatrix_columns(H, perm[:k])
        y = gf2.compress(ug, BitWord(r, syn)).bits
        zcols = Z.column_ints()
        for J1 in combinations(range(k), j):
            res = y
            for b in J1:
                res ^= zcols[b]
            if res.bit_count() == eta - j:
                E = [perm[b] for b in J1] + [perm[k + i] for i in range(r) if (res >> i) & 1]
                return IsdResult(tuple(sorted(E)), examined, draw)
    raise IterationsExhausted(f"no solution within {cfg.max_iterations} draws")
