"""Classification of strongly incidence-transitive codes.

Two independent strategies:

* :func:`chain_search` walks a catalog tree of maximal subgroups.  A node
  with two orbits on points is tested for transitivity on
  ``gamma x complement`` and for being the full setwise stabiliser; a
  transitive node is replaced by its own maximal subgroups.
* :func:`exhaustive_search` splits every k-subset into orbits (degree at
  most 24) and applies a stabiliser-free orbit-counting test.
"""

from __future__ import annotations

import logging
from math import comb
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import subsets as ss
from .catalog import CatalogEntry
from .perm import GeneratedGroup, Permutation, build_chain, is_transitive_on_product, orbit_partition
from .subsets import KSubset, image_of_set, k_subset_count

log = logging.getLogger(__name__)

SET_ORBIT_CAP = 1 << 24
TRIPLE_ORBIT_CAP = 1 << 27
EXHAUSTIVE_MAX_DEGREE = 24
_CHUNK = 1 << 16


class OrbitOverflow(RuntimeError):
    """An explicit orbit grew beyond its cap."""


class IncompleteSearchWarning(UserWarning):
    """A transitive catalog node has no subgroup data below it."""


@dataclass
class CandidateCode:
    group: CatalogEntry
    gamma: KSubset
    k: int
    stabilizer_order: int
    orbit_size: int
    source: str
    orbit: np.ndarray | None = field(default=None, repr=False)
    stabilizer: CatalogEntry | None = field(default=None, repr=False)
    #: the orbit member fixed by ``stabilizer`` (``gamma`` is the colex-minimal one)
    fixed_set: KSubset | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.orbit_size * self.stabilizer_order != self.group.declared_order:
            raise ValueError("orbit size times stabiliser order must equal |G|")

    @property
    def v(self) -> int:
        return self.group.degree

    @property
    def key(self) -> tuple:
        return (self.group.name, self.v, self.k, self.orbit_size, self.gamma.bits)


def divisibility_filter(v: int, k: int, h_order: int) -> bool:
    """True iff ``k(v-k)`` divides ``h_order``."""
    return h_order % (k * (v - k)) == 0


def _admissible(v: int, order: int, k_min: int = 2) -> bool:
    return any(divisibility_filter(v, k, order) for k in range(max(k_min, 1), v // 2 + 1))


# ------------------------------------------------------------------ orbits

def _int_keys(rows: np.ndarray) -> np.ndarray:
    # rows of at most 8 bytes pack into one little-endian uint64
    pad = np.zeros((rows.shape[0], 8), dtype=np.uint8)
    pad[:, :rows.shape[1]] = rows
    return pad.view("<u8").ravel()


def _int_rows(keys: np.ndarray, width: int) -> np.ndarray:
    return np.ascontiguousarray(keys.astype("<u8").view(np.uint8).reshape(-1, 8)[:, :width])


def _member(sorted_keys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    if sorted_keys.size == 0:
        return np.zeros(keys.shape, dtype=bool)
    idx = np.minimum(np.searchsorted(sorted_keys, keys), sorted_keys.size - 1)
    return sorted_keys[idx] == keys


class _HashCollision(Exception):
    pass


_MULT = np.array([0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F, 0x165667B19E3779F9, 0xD6E8FEB86659FD93,
                  0xFF51AFD7ED558CCD, 0xC4CEB9FE1A85EC53, 0x94D049BB133111EB, 0xBF58476D1CE4E5B9],
                 dtype=np.uint64)


def _row_hash(rows: np.ndarray) -> np.ndarray:
    n, width = rows.shape
    words = -(-width // 8)
    pad = np.zeros((n, 8 * words), dtype=np.uint8)
    pad[:, :width] = rows
    w = pad.view("<u8")
    h = np.zeros(n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i in range(words):
            h ^= w[:, i] * _MULT[i % 8]
            h = (h ^ (h >> np.uint64(29))) * _MULT[(i + 3) % 8]
    return h


def _dedupe(h: np.ndarray, rows: np.ndarray):
    """Unique rows by hash, verifying that equal hashes mean equal rows."""
    order = np.argsort(h, kind="stable")
    h, rows = h[order], rows[order]
    dup = np.flatnonzero(h[1:] == h[:-1])
    if dup.size and not np.array_equal(rows[dup], rows[dup + 1]):
        raise _HashCollision
    keep = np.ones(h.size, dtype=bool)
    keep[dup + 1] = False
    return h[keep], rows[keep]


def _bfs_hashed(start: np.ndarray, step, cap: int) -> np.ndarray:
    vh, vrows = _dedupe(_row_hash(start), start)
    frontier = vrows
    while frontier.shape[0]:
        hs, rs = [], []
        for lo in range(0, frontier.shape[0], _CHUNK):
            imgs = step(frontier[lo:lo + _CHUNK])
            h, r = _dedupe(_row_hash(imgs), imgs)
            idx = np.minimum(np.searchsorted(vh, h), vh.size - 1)
            hit = vh[idx] == h
            if hit.any() and not np.array_equal(vrows[idx[hit]], r[hit]):
                raise _HashCollision
            hs.append(h[~hit])
            rs.append(r[~hit])
        nh, nrows = _dedupe(np.concatenate(hs), np.concatenate(rs))
        if vh.size + nh.size > cap:
            raise OrbitOverflow(f"orbit exceeds cap {cap}")
        allh = np.concatenate([vh, nh])
        order = np.argsort(allh, kind="stable")
        vh, vrows = allh[order], np.concatenate([vrows, nrows])[order]
        frontier = nrows
    return vrows[ss.colex_order(vrows)]


def _bfs(start: np.ndarray, step, cap: int) -> np.ndarray:
    """Closure of packed rows under ``step`` (rows -> stacked images)."""
    width = start.shape[1]
    if width <= 8:
        to_keys, to_rows, member = _int_keys, _int_rows, _member
    else:
        try:
            return _bfs_hashed(start, step, cap)
        except _HashCollision:
            log.warning("64-bit row hash collision; using exact byte keys")
        to_keys, to_rows = ss.row_keys, ss.keys_to_rows
        member = lambda visited, keys: np.isin(keys, visited, assume_unique=True)
    visited = np.unique(to_keys(start))
    frontier = to_rows(visited, width)
    while frontier.shape[0]:
        found = []
        for lo in range(0, frontier.shape[0], _CHUNK):
            keys = np.unique(to_keys(step(frontier[lo:lo + _CHUNK])))
            found.append(keys[~member(visited, keys)])
        new = np.unique(np.concatenate(found)) if len(found) > 1 else found[0]
        if visited.size + new.size > cap:
            raise OrbitOverflow(f"orbit exceeds cap {cap}")
        visited = np.sort(np.concatenate([visited, new]))
        frontier = to_rows(new, width)
    rows = to_rows(visited, width)
    return rows[ss.colex_order(rows)]


def _inverse_arrays(g: GeneratedGroup) -> list[np.ndarray]:
    out = []
    for p in g.generators:
        inv = np.empty(g.degree, dtype=np.int64)
        inv[p.array] = np.arange(g.degree)
        out.append(inv)
    return out


def set_orbit(g: GeneratedGroup, gamma: KSubset, cap: int = SET_ORBIT_CAP) -> np.ndarray:
    """Orbit of ``gamma`` as packed rows in colex order.

    Raises :class:`OrbitOverflow` when it has more than ``cap`` elements.
    """
    v = g.degree
    invs = _inverse_arrays(g)

    def step(rows):
        dense = ss.to_dense(rows, v)
        return np.concatenate([ss.from_dense(dense[:, inv]) for inv in invs])

    return _bfs(ss.pack([gamma], v), step, cap)


def flag_orbit_size(g: GeneratedGroup, gamma: KSubset, points: tuple[int, ...],
                    cap: int = TRIPLE_ORBIT_CAP) -> int:
    """Size of the orbit of ``(gamma, *points)``."""
    v = g.degree
    nb = ss.nbytes(v)
    m = len(points)
    invs = _inverse_arrays(g)
    fwd = [p.array.astype(np.uint16) for p in g.generators]
    start = np.zeros((1, nb + 2 * m), dtype=np.uint8)
    start[0, :nb] = ss.pack([gamma], v)[0]
    start[0, nb:] = np.array(points, dtype="<u2").view(np.uint8)

    def step(rows):
        dense = ss.to_dense(np.ascontiguousarray(rows[:, :nb]), v)
        pts = np.ascontiguousarray(rows[:, nb:]).view("<u2")
        out = []
        for inv, p in zip(invs, fwd):
            img = np.empty_like(rows)
            img[:, :nb] = ss.from_dense(dense[:, inv])
            img[:, nb:] = p[pts].astype("<u2").view(np.uint8)
            out.append(img)
        return np.concatenate(out)

    return int(_bfs(start, step, cap).shape[0])


def triple_orbit_size(g: GeneratedGroup, gamma: KSubset, cap: int = TRIPLE_ORBIT_CAP) -> int:
    """Size of the orbit of ``(gamma, min gamma, min complement)``.

    ``gamma`` is strongly incidence-transitive iff this equals
    ``|orbit(gamma)| * k * (v - k)``.
    """
    u = gamma.points()[0]
    w = gamma.complement().points()[0]
    return flag_orbit_size(g, gamma, (u, w), cap)


def sit_by_orbit_counting(g: GeneratedGroup, gamma: KSubset, orbit_size: int,
                          cap: int = TRIPLE_ORBIT_CAP) -> bool:
    """Stabiliser-free SIT test, with the two cheaper flag orbits tried first."""
    k = len(gamma)
    v = g.degree
    u = gamma.points()[0]
    w = gamma.complement().points()[0]
    if flag_orbit_size(g, gamma, (w,), cap) != orbit_size * (v - k):
        return False
    if flag_orbit_size(g, gamma, (u,), cap) != orbit_size * k:
        return False
    return flag_orbit_size(g, gamma, (u, w), cap) == orbit_size * k * (v - k)


def canonical(rows: np.ndarray, v: int) -> KSubset:
    """Colex-minimal member of a set of packed rows."""
    return ss.unpack(rows[ss.colex_order(rows)[:1]], v)[0]


# ------------------------------------------------------------ subgroup tests

def sit_test_subgroup(h: GeneratedGroup, gamma: KSubset, h_order: int | None = None) -> bool:
    return is_transitive_on_product(h, gamma, h_order)


def _stabiliser_orbit(g_entry: CatalogEntry, h_entry: CatalogEntry, gamma: KSubset,
                      cap: int) -> np.ndarray | None:
    index = g_entry.declared_order // h_entry.declared_order
    rows = set_orbit(g_entry.group, gamma, min(cap, index))
    return rows if rows.shape[0] == index else None


def full_stabilizer_test(g_entry: CatalogEntry, h_entry: CatalogEntry, gamma: KSubset,
                         cap: int = SET_ORBIT_CAP) -> bool:
    """True iff ``h`` is the whole setwise stabiliser of ``gamma`` in ``g``.

    ``h`` fixes ``gamma``, so the orbit has at most ``|G:H|`` elements with
    equality exactly when ``h`` is the full stabiliser.
    """
    return _stabiliser_orbit(g_entry, h_entry, gamma, cap) is not None


# ------------------------------------------------------------ chain search

def chain_search(entry: CatalogEntry, k_min: int = 2, k_max: int | None = None,
                 cap: int = SET_ORBIT_CAP) -> list[CandidateCode]:
    """Depth-first search through the maximal-subgroup tree of ``entry``.

    Candidates whose orbit is all of ``J(v, k)`` are dropped: they have no
    neighbours and distance 1.
    """
    v = entry.degree
    k_max = v // 2 if k_max is None else min(k_max, v // 2)
    found: dict[tuple[int, int], CandidateCode] = {}

    def need_data(node: CatalogEntry):
        if any(divisibility_filter(v, k, node.declared_order) for k in range(k_min, k_max + 1)):
            warnings.warn(f"{node.name}: transitive node without maximal-subgroup data; "
                          "search is incomplete", IncompleteSearchWarning, stacklevel=3)

    if not entry.maximal_subgroups:
        need_data(entry)
    stack = list(reversed(entry.maximal_subgroups))
    while stack:
        h = stack.pop()
        orbits = orbit_partition(h.group)
        if len(orbits) > 2:
            continue
        if len(orbits) == 1:
            if h.maximal_subgroups:
                stack.extend(reversed(h.maximal_subgroups))
            else:
                need_data(h)
            continue
        small, large = sorted(orbits, key=len)
        halves = [small, large] if len(small) == len(large) else [small]
        for half in halves:
            k = len(half)
            if not k_min <= k <= k_max:
                continue
            if not divisibility_filter(v, k, h.declared_order):
                continue
            gamma = KSubset.from_points(v, half)
            if not is_transitive_on_product(h.group, gamma, chain=h.chain):
                log.debug("%s: not transitive on gamma x complement (k=%d)", h.name, k)
                continue
            rows = _stabiliser_orbit(entry, h, gamma, cap)
            if rows is None:
                log.debug("%s: not the full stabiliser (k=%d)", h.name, k)
                continue
            if rows.shape[0] == comb(v, k):
                continue
            rep = ss.unpack(rows[:1], v)[0]
            key = (k, rep.bits)
            if key in found:
                continue
            found[key] = CandidateCode(entry, rep, k, h.declared_order, rows.shape[0],
                                       "chain-search", rows, h, gamma)
            log.info("%s: code k=%d |orbit|=%d from %s", entry.label, k, rows.shape[0], h.name)
    return _drop_complement_twins(sorted(found.values(), key=lambda c: (c.k, c.orbit_size, c.gamma.bits)))


def _drop_complement_twins(cands: list[CandidateCode]) -> list[CandidateCode]:
    # at k = v/2 a code and its complement code are equivalent under complementation
    out = []
    reps = {c.gamma.bits for c in cands}
    for c in cands:
        if 2 * c.k == c.v and c.orbit is not None:
            comp_rows = ss.pack([c.gamma.complement()], c.v)
            in_orbit = np.isin(ss.row_keys(comp_rows), ss.row_keys(c.orbit))[0]
            if not in_orbit:
                twin = canonical(ss.from_dense(~ss.to_dense(c.orbit, c.v)), c.v)
                if twin.bits in reps and twin.bits < c.gamma.bits:
                    continue
        out.append(c)
    return out


def normalising_generators(entry: CatalogEntry, catalog: list[CatalogEntry]) -> list[Permutation]:
    """Generators of catalog groups on the same points that normalise ``entry``.

    Orbits swapped by such elements give equivalent codes (the two heptad
    orbits of M22 are exchanged inside M22.2).
    """
    out = []
    for other in catalog:
        if other is entry or other.degree != entry.degree:
            continue
        if other.declared_order <= entry.declared_order or other.declared_order % entry.declared_order:
            continue
        if not all(other.chain.contains(g) for g in entry.generators):
            continue
        if all(entry.chain.contains(~h * g * h) for h in other.generators for g in entry.generators):
            out.extend(other.generators)
    return out


def merge_equivalent(cands: list[CandidateCode], elements: list[Permutation]) -> list[CandidateCode]:
    """Keep one candidate per class of orbits related by ``elements``."""
    if not elements or len(cands) < 2:
        return cands
    parent = list(range(len(cands)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    keys = [ss.row_keys(c.orbit) if c.orbit is not None else None for c in cands]
    for i, c in enumerate(cands):
        for h in elements:
            img = ss.pack([image_of_set(h, c.gamma)], c.v)
            ik = ss.row_keys(img)
            for j, d in enumerate(cands):
                if j != i and d.k == c.k and d.orbit_size == c.orbit_size and keys[j] is not None \
                        and np.isin(ik, keys[j])[0]:
                    a, b = find(i), find(j)
                    parent[max(a, b)] = min(a, b)
    return [c for i, c in enumerate(cands) if find(i) == i]


# --------------------------------------------------------- exhaustive search

def _all_masks(v: int, k: int) -> np.ndarray:
    """All k-subsets of a v-set as integer masks, ascending (= colex order)."""
    if v > 32:
        raise ValueError("integer-mask enumeration supports v <= 32")
    if v <= 26:
        m = np.arange(1 << v, dtype=np.uint32)
        return m[np.bitwise_count(m) == k]
    from itertools import combinations
    out = np.fromiter((sum(1 << c for c in cs) for cs in combinations(range(v), k)),
                      dtype=np.uint64, count=k_subset_count(v, k))
    return np.sort(out).astype(np.uint32)


def _mask_image(masks: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.zeros_like(masks)
    v = perm.size
    for byte in range((v + 7) // 8):
        table = np.zeros(256, dtype=masks.dtype)
        for b in range(256):
            img = 0
            for i in range(8):
                src = 8 * byte + i
                if b >> i & 1 and src < v:
                    img |= 1 << int(perm[src])
            table[b] = img
        out |= table[(masks >> (8 * byte)) & 0xFF]
    return out


def _masks_to_rows(masks: np.ndarray, v: int) -> np.ndarray:
    nb = ss.nbytes(v)
    return np.ascontiguousarray(masks.astype("<u4").view(np.uint8).reshape(-1, 4)[:, :nb])


def _sit_invariants_ok(orbit_masks: np.ndarray, gamma_mask: int, v: int) -> bool:
    """Necessary condition for transitivity of the stabiliser on gamma x complement.

    For each intersection size j the number of j-meeting codewords through a
    point is invariant under the setwise stabiliser, so it must be constant
    on gamma and on its complement.
    """
    inter = np.bitwise_count(orbit_masks & np.uint32(gamma_mask))
    bits = ((orbit_masks[:, None] >> np.arange(v, dtype=np.uint32)) & 1).astype(np.int64)
    inside = np.array([gamma_mask >> i & 1 for i in range(v)], dtype=bool)
    for j in np.unique(inter):
        f = bits[inter == j].sum(axis=0)
        if np.unique(f[inside]).size > 1 or np.unique(f[~inside]).size > 1:
            return False
    return True


@dataclass
class ExhaustiveStats:
    """Bookkeeping from one exhaustive sweep."""

    k: int
    subsets: int
    visited: int
    orbits: int
    tested: int


def exhaustive_search(entry: CatalogEntry, k: int, cap: int = TRIPLE_ORBIT_CAP,
                      stats: list | None = None) -> list[CandidateCode]:
    """All SIT orbits on k-subsets, by a colex-rank sweep with per-orbit BFS."""
    v = entry.degree
    if v > EXHAUSTIVE_MAX_DEGREE:
        raise ValueError(f"exhaustive search supports degree <= {EXHAUSTIVE_MAX_DEGREE}, got {v}")
    if not 2 <= k <= v // 2:
        raise ValueError(f"k={k} outside 2..{v // 2}")
    order = entry.declared_order
    total = k_subset_count(v, k)
    masks = _all_masks(v, k)
    images = [np.searchsorted(masks, _mask_image(masks, g.array)).astype(np.int64)
              for g in entry.generators]
    img = np.stack(images)
    visited = np.zeros(total, dtype=bool)
    out = []
    n_orbits = tested = 0
    ptr = 0
    while True:
        free = np.flatnonzero(~visited[ptr:ptr + 4096])
        while free.size == 0 and ptr < total:
            ptr += 4096
            free = np.flatnonzero(~visited[ptr:ptr + 4096])
        if free.size == 0:
            break
        rep = ptr + int(free[0])
        ptr = rep
        visited[rep] = True
        frontier = np.array([rep], dtype=np.int64)
        members = [frontier]
        while frontier.size:
            nxt = np.unique(img[:, frontier].ravel())
            nxt = nxt[~visited[nxt]]
            visited[nxt] = True
            members.append(nxt)
            frontier = nxt
        ranks = np.concatenate(members)
        n_orbits += 1
        size = ranks.size
        if size == total or order % size:
            continue
        if not divisibility_filter(v, k, order // size):
            continue
        orbit_masks = np.sort(masks[ranks])
        gmask = int(masks[rep])
        if not _sit_invariants_ok(orbit_masks, gmask, v):
            continue
        tested += 1
        gamma = KSubset(v, gmask)
        if not sit_by_orbit_counting(entry.group, gamma, size, cap):
            continue
        out.append(CandidateCode(entry, gamma, k, order // size, size, "exhaustive",
                                 _masks_to_rows(orbit_masks, v)))
        log.info("%s: code k=%d |orbit|=%d (exhaustive)", entry.label, k, size)
    if stats is not None:
        stats.append(ExhaustiveStats(k, total, int(visited.sum()), n_orbits, tested))
    return _drop_complement_twins(out)


def setwise_stabilizer(entry: CatalogEntry, gamma: KSubset, cap: int = 1 << 17,
                       seed: int = 0) -> tuple[GeneratedGroup, int]:
    """Stabiliser of ``gamma`` from Schreier generators of its orbit.

    Returns the group and the orbit size.  Random Schreier generators are
    added until the chain order reaches ``|G| / |orbit|``.
    """
    v = entry.degree
    gens = entry.generators
    trans: dict[int, Permutation] = {gamma.bits: Permutation.identity(v)}
    queue = [gamma]
    for s in queue:
        for g in gens:
            img = image_of_set(g, s)
            if img.bits not in trans:
                if len(trans) >= cap:
                    raise OrbitOverflow(f"orbit exceeds cap {cap}")
                trans[img.bits] = trans[s.bits] * g
                queue.append(img)
    target = entry.declared_order // len(trans)
    rng = np.random.default_rng(seed)
    stab: list[Permutation] = []
    chain = None
    while (chain.order() if chain is not None else 1) < target:
        s = queue[int(rng.integers(len(queue)))]
        g = gens[int(rng.integers(len(gens)))]
        sg = trans[s.bits] * g * ~trans[image_of_set(g, s).bits]
        if sg.is_identity() or (chain is not None and chain.contains(sg)):
            continue
        stab.append(sg)
        chain = build_chain(GeneratedGroup(v, tuple(stab)))
    if chain is None:
        return GeneratedGroup.trivial(v), len(trans)
    return GeneratedGroup(v, tuple(stab)), len(trans)
