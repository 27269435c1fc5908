"""k-subsets of the point set, the Johnson metric, and colex ranking.

A :class:`KSubset` is a bitset over at most :data:`MAX_DEGREE` points, held
as a Python integer (bit ``i`` set iff point ``i`` is a member).  Colex
order on k-subsets coincides with numeric order of these integers.

Bulk operations work on packed arrays: one row per subset, ``nbytes(v)``
``uint8`` columns, bit ``i`` in byte ``i // 8`` at position ``i % 8``
(``numpy.packbits(..., bitorder="little")``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_DEGREE = 512
_U64 = 1 << 64


@dataclass(frozen=True)
class KSubset:
    v: int
    bits: int

    def __post_init__(self):
        if not 0 < self.v <= MAX_DEGREE:
            raise ValueError(f"degree {self.v} outside 1..{MAX_DEGREE}")
        if self.bits < 0 or self.bits >> self.v:
            raise ValueError("bit set beyond the point set")

    @classmethod
    def from_points(cls, v: int, points: Iterable[int]) -> "KSubset":
        bits = 0
        for x in points:
            if not 0 <= x < v:
                raise ValueError(f"point {x} outside 0..{v - 1}")
            bits |= 1 << int(x)
        return cls(v, bits)

    @classmethod
    def parse(cls, text: str, v: int) -> "KSubset":
        """Parse the 1-based brace form, e.g. ``{1,2,5}``."""
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"expected braces: {text!r}")
        body = body[1:-1].strip()
        pts = [int(t) - 1 for t in body.split(",")] if body else []
        return cls.from_points(v, pts)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: int) -> bool:
        return bool(self.bits >> x & 1)

    def __lt__(self, other: "KSubset") -> bool:
        return self.bits < other.bits

    def points(self) -> tuple[int, ...]:
        b, out, i = self.bits, [], 0
        while b:
            if b & 1:
                out.append(i)
            b >>= 1
            i += 1
        return tuple(out)

    def complement(self) -> "KSubset":
        return complement(self)

    def __str__(self) -> str:
        return "{" + ",".join(str(x + 1) for x in self.points()) + "}"


def _check_pair(a: KSubset, b: KSubset) -> None:
    if a.v != b.v:
        raise ValueError(f"capacity mismatch: {a.v} vs {b.v}")


def intersection_size(a: KSubset, b: KSubset) -> int:
    _check_pair(a, b)
    return (a.bits & b.bits).bit_count()


def johnson_distance(a: KSubset, b: KSubset) -> int:
    _check_pair(a, b)
    k = len(a)
    if len(b) != k:
        raise ValueError("Johnson distance needs subsets of equal size")
    return k - intersection_size(a, b)


def complement(a: KSubset) -> KSubset:
    return KSubset(a.v, ((1 << a.v) - 1) ^ a.bits)


def image_of_set(p, a: KSubset) -> KSubset:
    """``{p(x) : x in a}`` for a :class:`~jntcodes.perm.Permutation` ``p``."""
    if p.degree != a.v:
        raise ValueError("degree mismatch")
    arr = p.array
    bits = 0
    for x in a.points():
        bits |= 1 << int(arr[x])
    return KSubset(a.v, bits)


@lru_cache(maxsize=None)
def _pascal() -> tuple[tuple[int, ...], ...]:
    rows = [(1,)]
    for n in range(1, MAX_DEGREE + 1):
        prev = rows[-1]
        rows.append(tuple([1] + [prev[i - 1] + prev[i] for i in range(1, n)] + [1]))
    return tuple(rows)


def k_subset_count(v: int, k: int) -> int:
    """Binomial coefficient C(v, k), refusing values outside 64-bit range."""
    if not 0 <= v <= MAX_DEGREE:
        raise ValueError(f"v={v} outside 0..{MAX_DEGREE}")
    if k < 0 or k > v:
        return 0
    c = _pascal()[v][k]
    if c >= _U64:
        raise OverflowError(f"C({v},{k}) does not fit in 64 bits")
    return c


def colex_rank(a: KSubset) -> int:
    r = 0
    for i, c in enumerate(a.points()):
        r += k_subset_count(c, i + 1)
    return r


def colex_unrank(r: int, k: int, v: int) -> KSubset:
    total = k_subset_count(v, k)
    if not 0 <= r < total:
        raise ValueError(f"rank {r} outside 0..{total - 1}")
    bits = 0
    c = v - 1
    for i in range(k, 0, -1):
        while k_subset_count(c, i) > r:
            c -= 1
        r -= k_subset_count(c, i)
        bits |= 1 << c
        c -= 1
    return KSubset(v, bits)


# ---------------------------------------------------------------- packed rows

def nbytes(v: int) -> int:
    return (v + 7) // 8


def pack(subsets: Sequence[KSubset], v: int) -> np.ndarray:
    nb = nbytes(v)
    out = np.zeros((len(subsets), nb), dtype=np.uint8)
    for i, s in enumerate(subsets):
        out[i] = np.frombuffer(s.bits.to_bytes(nb, "little"), dtype=np.uint8)
    return out


def unpack(rows: np.ndarray, v: int) -> list[KSubset]:
    return [KSubset(v, int.from_bytes(r.tobytes(), "little")) for r in rows]


def to_dense(rows: np.ndarray, v: int) -> np.ndarray:
    """``(n, v)`` boolean incidence matrix."""
    return np.unpackbits(rows, axis=1, count=v, bitorder="little").astype(bool)


def from_dense(dense: np.ndarray) -> np.ndarray:
    return np.packbits(dense, axis=1, bitorder="little")


def row_keys(rows: np.ndarray) -> np.ndarray:
    """1-d void view of packed rows, usable with unique/isin/searchsorted."""
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.shape[1]))).ravel()


def keys_to_rows(keys: np.ndarray, width: int) -> np.ndarray:
    return np.ascontiguousarray(keys).view(np.uint8).reshape(-1, width)


def permute_rows(rows: np.ndarray, perm: np.ndarray, v: int) -> np.ndarray:
    """Images of packed subsets under the permutation with image array ``perm``."""
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=perm.dtype)
    return from_dense(to_dense(rows, v)[:, inv])


def colex_order(rows: np.ndarray) -> np.ndarray:
    """Argsort of packed rows in colex order (most significant byte first)."""
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return np.lexsort(rows.T)


def popcounts(rows: np.ndarray) -> np.ndarray:
    return np.bitwise_count(rows).sum(axis=1, dtype=np.int64)


def colex_rank_dense(elements: np.ndarray) -> np.ndarray:
    """Colex ranks of rows of ascending point indices, shape ``(n, k)``."""
    n, k = elements.shape
    v = int(elements.max()) + 1 if elements.size else 0
    table = binomial_table(max(v, 1), k)
    r = np.zeros(n, dtype=np.int64)
    for i in range(k):
        r += table[elements[:, i], i + 1]
    return r


@lru_cache(maxsize=None)
def binomial_table(n: int, k: int) -> np.ndarray:
    """``table[c, j] = C(c, j)`` for ``c < n``, ``j <= k``, as int64."""
    t = np.zeros((n, k + 1), dtype=np.int64)
    for c in range(n):
        for j in range(k + 1):
            t[c, j] = k_subset_count(c, j) if j <= c else 0
    t.flags.writeable = False
    return t
