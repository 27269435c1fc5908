"""Properties of classified codes and comparison with the reference table."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, TextIO

import numpy as np

from . import subsets as ss
from .engine import CandidateCode, OrbitOverflow, set_orbit
from .perm import GeneratedGroup
from .subsets import KSubset, k_subset_count

#: Minimum distance of a code with a single word.
INFINITE_DISTANCE = sys.maxsize
NAIVE_LIMIT = 10_000
NEIGHBOUR_CAP = 1 << 27
DESIGN_SUBSETS_LIMIT = 10 ** 6


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Code:
    """An explicit code: packed rows (one k-subset each) in colex order."""

    v: int
    k: int
    rows: np.ndarray = field(repr=False)

    @classmethod
    def from_candidate(cls, c: CandidateCode) -> "Code":
        if c.orbit is None:
            raise ValueError("candidate has no explicit orbit")
        return cls(c.v, c.k, c.orbit)

    @classmethod
    def from_subsets(cls, v: int, words: Iterable[KSubset]) -> "Code":
        words = sorted(set(words), key=lambda s: s.bits)
        ks = {len(w) for w in words}
        if len(ks) != 1:
            raise ValueError("codewords must share one size")
        return cls(v, ks.pop(), ss.pack(words, v))

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    def words(self) -> list[KSubset]:
        return ss.unpack(self.rows, self.v)

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        return np.isin(ss.row_keys(rows), ss.row_keys(self.rows))


def min_distance(code: Code) -> int:
    """Distance from the first codeword to all others.

    Valid for codes on which the group is transitive: the distance profile is
    the same from every codeword.
    """
    if len(code) < 2:
        return INFINITE_DISTANCE
    inter = ss.popcounts(code.rows[1:] & code.rows[0])
    return code.k - int(inter.max())


def min_distance_naive(code: Code, limit: int = NAIVE_LIMIT) -> int:
    """Pairwise minimum over all codeword pairs."""
    n = len(code)
    if n > limit:
        raise BudgetExceeded(f"{n} codewords exceed the pairwise budget {limit}")
    if n < 2:
        return INFINITE_DISTANCE
    dense = ss.to_dense(code.rows, code.v).astype(np.float32)
    gram = dense @ dense.T
    np.fill_diagonal(gram, -1)
    return code.k - int(gram.max())


def neighbour_set(code: Code, cap: int = NEIGHBOUR_CAP) -> np.ndarray:
    """Non-codewords at Johnson distance 1 from some codeword, colex-sorted rows."""
    n, v, k = len(code), code.v, code.k
    if n * k * (v - k) > cap:
        raise BudgetExceeded(f"{n * k * (v - k)} adjacent pairs exceed the cap {cap}")
    dense = ss.to_dense(code.rows, v)
    inside = np.nonzero(dense)[1].reshape(n, k)
    outside = np.nonzero(~dense)[1].reshape(n, v - k)
    ar = np.arange(n)
    chunks = []
    for i in range(k):
        base = code.rows.copy()
        base[ar, inside[:, i] // 8] ^= (1 << (inside[:, i] % 8)).astype(np.uint8)
        block = np.repeat(base[None], v - k, axis=0)
        for j in range(v - k):
            block[j, ar, outside[:, j] // 8] ^= (1 << (outside[:, j] % 8)).astype(np.uint8)
        chunks.append(np.unique(ss.row_keys(block.reshape(-1, base.shape[1]))))
    keys = np.unique(np.concatenate(chunks))
    keys = keys[~np.isin(keys, ss.row_keys(code.rows))]
    rows = ss.keys_to_rows(keys, code.rows.shape[1])
    return rows[ss.colex_order(rows)]


def is_neighbour_transitive(code: Code, group: GeneratedGroup, cap: int = NEIGHBOUR_CAP) -> bool:
    """Transitivity of ``group`` on the code and on its neighbour set."""
    if len(code) == 0:
        return False
    nbrs = neighbour_set(code, cap)
    try:
        if set_orbit(group, ss.unpack(code.rows[:1], code.v)[0],
                     len(code)).shape[0] != len(code):
            return False
    except OrbitOverflow:
        return False
    if nbrs.shape[0] == 0:
        return True
    first = ss.unpack(nbrs[:1], code.v)[0]
    try:
        orbit = set_orbit(group, first, nbrs.shape[0])
    except OrbitOverflow:
        return False
    return orbit.shape[0] == nbrs.shape[0]


def is_self_complementary(code: Code) -> bool:
    if 2 * code.k != code.v or len(code) == 0:
        return False
    comp = complement_code(code)
    first = bool(code.contains_rows(comp.rows[:1])[0])
    if __debug__ and len(code) <= 1 << 20:
        assert first == bool(code.contains_rows(comp.rows).all())
    return first


def complement_code(code: Code) -> Code:
    rows = ss.from_dense(~ss.to_dense(code.rows, code.v))
    return Code(code.v, code.v - code.k, rows[ss.colex_order(rows)])


def design_counts(code: Code, t: int, method: str = "auto") -> np.ndarray:
    """Number of codewords through each t-subset, indexed by colex rank."""
    v, k, n = code.v, code.k, len(code)
    n_t = k_subset_count(v, t)
    if n_t > DESIGN_SUBSETS_LIMIT:
        raise BudgetExceeded(f"C({v},{t}) = {n_t} t-subsets exceed {DESIGN_SUBSETS_LIMIT}")
    if t > k:
        return np.zeros(n_t, dtype=np.int64)
    dense = ss.to_dense(code.rows, v)
    if method == "auto":
        method = "gram" if t <= 2 else "ranks"
    if method == "gram":
        if t == 1:
            return dense.sum(axis=0, dtype=np.int64)
        if t != 2:
            raise ValueError("gram accumulation handles t <= 2")
        gram = np.zeros((v, v), dtype=np.float64)
        for lo in range(0, n, 1 << 15):
            d = dense[lo:lo + (1 << 15)].astype(np.float64)
            gram += d.T @ d
        a, b = np.triu_indices(v, 1)
        table = ss.binomial_table(v, 2)
        counts = np.zeros(n_t, dtype=np.int64)
        counts[table[a, 1] + table[b, 2]] = np.rint(gram[a, b]).astype(np.int64)
        return counts
    elems = np.nonzero(dense)[1].reshape(n, k)
    combos = np.array(list(combinations(range(k), t)), dtype=np.int64)
    table = ss.binomial_table(v, t)
    counts = np.zeros(n_t, dtype=np.int64)
    step = max(1, (1 << 22) // len(combos))
    for lo in range(0, n, step):
        sub = elems[lo:lo + step][:, combos]
        r = np.zeros(sub.shape[:2], dtype=np.int64)
        for i in range(t):
            r += table[sub[..., i], i + 1]
        counts += np.bincount(r.ravel(), minlength=n_t)
    return counts


def design_lambda(code: Code, t: int, method: str = "auto") -> int | None:
    """lambda if the codewords form a t-design, else ``None``."""
    if not 1 <= t <= 5:
        raise ValueError("t must lie in 1..5")
    counts = design_counts(code, t, method)
    lam = int(counts[0])
    return lam if bool((counts == lam).all()) else None


def export_hamming(code: Code, sink: TextIO, delta: int | None = None) -> int:
    """Write the code as binary words of length v (character i is point i+1)."""
    if delta is None:
        delta = min_distance(code)
    dense = ss.to_dense(code.rows, code.v)
    sink.write(f"# length {code.v}\n# weight {code.k}\n# words {len(code)}\n")
    sink.write(f"# min_hamming_distance {2 * delta if delta != INFINITE_DISTANCE else 'inf'}\n")
    ones = np.where(dense, ord("1"), ord("0")).astype(np.uint8)
    for row in ones:
        sink.write(row.tobytes().decode("ascii") + "\n")
    return len(code)


def read_hamming(text: str) -> tuple[dict[str, str], list[str]]:
    header, words = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(" ")
            header[key] = val
        elif line:
            words.append(line)
    return header, words


def hamming_min_distance(words: list[str]) -> int:
    """Direct pairwise Hamming scan."""
    bits = np.array([[c == "1" for c in w] for w in words], dtype=np.float32)
    n, length = bits.shape
    agree = bits @ bits.T + (1 - bits) @ (1 - bits).T
    np.fill_diagonal(agree, -1)
    return int(length - agree.max())


# ----------------------------------------------------------------- reference

@dataclass(frozen=True)
class ExpectedRow:
    line: int
    group: str
    v: int
    k: int
    delta: int
    size: int
    description: str
    self_complementary: bool = False
    design_t: int | None = None
    design_lambda: int | None = None


def _row(line, group, v, k, delta, size, desc, sc=False, t=None, lam=None):
    return ExpectedRow(line, group, v, k, delta, size, desc, sc, t, lam)


EXPECTED_ROWS = (
    _row(1, "L2(11)", 11, 5, 3, 11, "2-(11,5,2) biplane", t=2, lam=2),
    _row(2, "A7", 15, 7, 4, 15, "planes of PG(3,2)"),
    _row(3, "M11", 12, 6, 3, 22, "totals", sc=True),
    _row(4, "M22", 22, 6, 4, 77, "3-(22,6,1) design", t=3, lam=1),
    _row(5, "M22", 22, 7, 4, 176, "heptads"),
    _row(6, "M22", 22, 8, 4, 330, "octads"),
    _row(7, "M22", 22, 10, 4, 616, "decads"),
    _row(8, "M22.2", 22, 6, 4, 77, "3-(22,6,1) design", t=3, lam=1),
    _row(9, "M22.2", 22, 7, 3, 352, "heptads"),
    _row(10, "M22.2", 22, 8, 4, 330, "octads"),
    _row(11, "M22.2", 22, 10, 4, 616, "decads"),
    _row(12, "M23", 23, 7, 4, 253, "4-(23,7,1) design", t=4, lam=1),
    _row(13, "M23", 23, 8, 4, 506, "octads"),
    _row(14, "M23", 23, 11, 4, 1288, "endecads"),
    _row(15, "M24", 24, 8, 4, 759, "5-(24,8,1) design", t=5, lam=1),
    _row(16, "M24", 24, 12, 4, 2576, "duum", sc=True),
    _row(17, "HS", 176, 50, 36, 176, "2-(176,50,14)", t=2, lam=14),
    _row(18, "HS", 176, 56, 32, 1100, "2-(176,56,110)", t=2, lam=110),
    _row(19, "Co3", 276, 6, 3, 708400, "2-(276,6,280)", t=2, lam=280),
    _row(20, "Co3", 276, 36, 24, 170775, "2-(276,36,2835)", t=2, lam=2835),
    _row(21, "Co3", 276, 100, 50, 11178, "2-(276,100,1458)", t=2, lam=1458),
    _row(22, "Co3", 276, 126, 36, 655776, "2-(276,126,136080)", t=2, lam=136080),
    _row(23, "A7", 15, 3, 2, 35, "lines of PG(3,2)"),
    _row(24, "M11", 11, 5, 2, 66, "4-(11,5,1) design", t=4, lam=1),
    _row(25, "M11", 12, 6, 2, 110, "halves of quadrisect.", sc=True),
    _row(26, "M12", 12, 6, 2, 132, "5-(12,6,1) design", sc=True, t=5, lam=1),
    _row(27, "M24", 24, 12, 2, 35420, "5-(24,12,660)", sc=True, t=5, lam=660),
)


@dataclass
class ExpectedTable:
    rows: tuple[ExpectedRow, ...] = EXPECTED_ROWS

    def __post_init__(self):
        if len(self.rows) != 27:
            raise ValueError("reference table must have 27 rows")

    def for_groups(self, labels: Iterable[tuple[str, int]]) -> list[ExpectedRow]:
        wanted = set(labels)
        return [r for r in self.rows if (r.group, r.v) in wanted]

    def find(self, group: str, v: int, k: int, size: int) -> ExpectedRow | None:
        for r in self.rows:
            if (r.group, r.v, r.k, r.size) == (group, v, k, size):
                return r
        return None

    def perturbed(self, line: int) -> "ExpectedTable":
        """Copy with the distance of one line increased by one (negative control)."""
        return ExpectedTable(tuple(replace(r, delta=r.delta + 1) if r.line == line else r
                                   for r in self.rows))


EXPECTED = ExpectedTable()


# ------------------------------------------------------------------- records

@dataclass
class CodeRecord:
    candidate: CandidateCode
    delta: int
    sit: bool
    neighbour_transitive: bool | None
    self_complementary: bool
    design: list[tuple[int, int | None]]
    hamming: tuple[int, int, int, int]
    delta_naive: int | None = None

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("minimum distance must be positive")
        v, k, dist, count = self.hamming
        if self.delta != INFINITE_DISTANCE and dist != 2 * self.delta:
            raise ValueError("Hamming distance must be twice the Johnson distance")
        if count != self.candidate.orbit_size:
            raise ValueError("word count must equal the orbit size")

    @property
    def group(self) -> str:
        return self.candidate.group.name

    @property
    def v(self) -> int:
        return self.candidate.v

    @property
    def k(self) -> int:
        return self.candidate.k

    @property
    def size(self) -> int:
        return self.candidate.orbit_size

    @property
    def sort_key(self) -> tuple:
        return (self.group, self.v, self.k, self.size)

    @property
    def strongest_design(self) -> tuple[int, int | None]:
        good = [d for d in self.design if d[1] is not None]
        return max(good) if good else self.design[0]


def analyse(candidate: CandidateCode, expected: ExpectedTable = EXPECTED,
            neighbour_cap: int = NEIGHBOUR_CAP) -> CodeRecord:
    code = Code.from_candidate(candidate)
    delta = min_distance(code)
    naive = min_distance_naive(code) if len(code) <= NAIVE_LIMIT else None
    if naive is not None and naive != delta:
        raise AssertionError(f"distance scan disagrees with pairwise oracle: {delta} vs {naive}")
    try:
        nt = is_neighbour_transitive(code, candidate.group.group, neighbour_cap)
    except BudgetExceeded:
        nt = None
    design = [(2, design_lambda(code, 2))]
    ref = expected.find(candidate.group.name, candidate.v, candidate.k, candidate.orbit_size)
    if ref is not None and ref.design_t and ref.design_t > 2:
        try:
            design.append((ref.design_t, design_lambda(code, ref.design_t)))
        except BudgetExceeded:
            pass
    hamming = (code.v, code.k, 2 * delta if delta != INFINITE_DISTANCE else delta, len(code))
    return CodeRecord(candidate, delta, True, nt, is_self_complementary(code), design, hamming, naive)


# ------------------------------------------------------------------ reporting

HEADER = "group\tv\tk\tdelta\tsize\tsc\tdesign_t\tdesign_lambda\tstatus"


@dataclass
class TableRow:
    status: str
    record: CodeRecord | None
    expected: ExpectedRow | None

    def tsv(self) -> str:
        if self.record is None:
            e = self.expected
            return f"{e.group}\t{e.v}\t{e.k}\t{e.delta}\t{e.size}\t{int(e.self_complementary)}\t\t\t{self.status}"
        r = self.record
        t, lam = r.strongest_design
        return (f"{r.group}\t{r.v}\t{r.k}\t{r.delta}\t{r.size}\t{int(r.self_complementary)}\t"
                f"{t}\t{'' if lam is None else lam}\t{self.status}")


@dataclass
class TableReport:
    rows: list[TableRow]
    distance3_lines: list[int]
    distance2_lines: list[int]
    expected_distance3: list[int]
    expected_distance2: list[int]

    @property
    def mismatches(self) -> list[TableRow]:
        return [r for r in self.rows if not r.status.startswith("line ")]

    @property
    def ok(self) -> bool:
        return (not self.mismatches and self.distance3_lines == self.expected_distance3
                and self.distance2_lines == self.expected_distance2)

    def tsv(self) -> str:
        return "\n".join([HEADER] + [r.tsv() for r in self.rows]) + "\n"


def reproduce_table(records: list[CodeRecord], expected: ExpectedTable = EXPECTED,
                    groups: Iterable[tuple[str, int]] | None = None) -> TableReport:
    """Row-by-row comparison on (v, k, delta, size, self-complementarity)."""
    if groups is None:
        groups = {(r.group, r.v) for r in records}
    scope = expected.for_groups(groups)
    rows: list[TableRow] = []
    matched: set[int] = set()
    at_least3, exactly2 = [], []
    for rec in sorted(records, key=lambda r: r.sort_key):
        ref = next((e for e in scope if (e.group, e.v, e.k, e.size) == rec.sort_key), None)
        if rec.delta < 2:
            rows.append(TableRow("delta<2", rec, ref))
            continue
        if ref is None or ref.line in matched:
            rows.append(TableRow("extra", rec, None))
            continue
        matched.add(ref.line)
        if ref.delta != rec.delta or ref.self_complementary != rec.self_complementary:
            rows.append(TableRow(f"mismatch line {ref.line}", rec, ref))
            continue
        rows.append(TableRow(f"line {ref.line}", rec, ref))
        (at_least3 if rec.delta >= 3 else exactly2).append(ref.line)
    for e in scope:
        if e.line not in matched:
            rows.append(TableRow("missing", None, e))
    rows.sort(key=_row_key)
    return TableReport(rows, sorted(at_least3), sorted(exactly2),
                       sorted(e.line for e in scope if e.delta >= 3),
                       sorted(e.line for e in scope if e.delta == 2))


def _row_key(r: TableRow) -> tuple:
    if r.record is not None:
        return r.record.sort_key
    e = r.expected
    return (e.group, e.v, e.k, e.size)
