"""Permutations, generated groups and stabilizer chains.

Permutations act on the right: ``compose(p, q)`` is "first p, then q", so
``compose(p, q)(i) == q(p(i))``.  Points are 0-based.

The stabilizer chain is built by a deterministic Schreier-Sims procedure
(no random elements).  When the group order is known in advance it is used
as a stopping rule, which is what makes chains of groups such as Co3 on 276
points cheap to build.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .subsets import KSubset

#: Orders are held with unsigned 64-bit semantics.
ORDER_LIMIT = 1 << 64


class Permutation:
    """A bijection of ``{0, ..., degree-1}`` stored as an image array."""

    __slots__ = ("_a", "_hash")

    def __init__(self, images: Iterable[int]):
        a = np.array(list(images) if not isinstance(images, np.ndarray) else images,
                     dtype=np.int32)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("a permutation needs a non-empty 1-d image array")
        check = np.zeros(a.size, dtype=bool)
        if a.min() < 0 or a.max() >= a.size:
            raise ValueError("image out of range")
        check[a] = True
        if not check.all():
            raise ValueError("image array is not a bijection")
        a.flags.writeable = False
        self._a = a
        self._hash = None

    @classmethod
    def _trusted(cls, a: np.ndarray) -> "Permutation":
        p = cls.__new__(cls)
        a.flags.writeable = False
        p._a = a
        p._hash = None
        return p

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls._trusted(np.arange(degree, dtype=np.int32))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        a = np.arange(degree, dtype=np.int32)
        for cyc in cycles:
            for x, y in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                a[x] = y
        return cls(a)

    @property
    def degree(self) -> int:
        return int(self._a.size)

    @property
    def array(self) -> np.ndarray:
        """Read-only image array."""
        return self._a

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self._a)

    def __call__(self, i: int) -> int:
        return int(self._a[i])

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._a.size == other._a.size and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._a.tobytes())
        return self._hash

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._a, np.arange(self._a.size)))

    def moved_points(self) -> np.ndarray:
        return np.flatnonzero(self._a != np.arange(self._a.size))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for i in range(self.degree):
            if seen[i] or self._a[i] == i:
                continue
            cyc = [i]
            seen[i] = True
            j = int(self._a[i])
            while j != i:
                cyc.append(j)
                seen[j] = True
                j = int(self._a[j])
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        from math import lcm
        return lcm(1, *(len(c) for c in self.cycles()))

    def __repr__(self) -> str:
        cyc = "".join("(" + ",".join(str(x) for x in c) + ")" for c in self.cycles())
        return f"Permutation<{self.degree}>{cyc or '()'}"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p`` followed by ``q``."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} vs {q.degree}")
    return Permutation._trusted(q._a[p._a])


def inverse(p: Permutation) -> Permutation:
    inv = np.empty_like(p._a)
    inv[p._a] = np.arange(p._a.size, dtype=np.int32)
    return Permutation._trusted(inv)


@dataclass(frozen=True)
class GeneratedGroup:
    """A permutation group given by generators of a common degree."""

    degree: int
    generators: tuple[Permutation, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("a generated group needs at least one generator")
        for g in gens:
            if g.degree != self.degree:
                raise ValueError(f"generator of degree {g.degree} in a group of degree {self.degree}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def trivial(cls, degree: int) -> "GeneratedGroup":
        return cls(degree, (Permutation.identity(degree),))

    @classmethod
    def from_images(cls, images: Sequence[Sequence[int]]) -> "GeneratedGroup":
        gens = tuple(Permutation(a) for a in images)
        return cls(gens[0].degree, gens)

    def generator_matrix(self) -> np.ndarray:
        return np.stack([g.array for g in self.generators])


def point_orbit(g: GeneratedGroup, u: int) -> frozenset[int]:
    return frozenset(int(x) for x in _orbit_array(g.generator_matrix(), g.degree, [u]))


def _orbit_array(gens: np.ndarray, degree: int, start) -> np.ndarray:
    seen = np.zeros(degree, dtype=bool)
    frontier = np.unique(np.asarray(start, dtype=np.int64))
    seen[frontier] = True
    while frontier.size:
        img = gens[:, frontier].ravel()
        img = np.unique(img[~seen[img]])
        seen[img] = True
        frontier = img
    return np.flatnonzero(seen)


def orbit_partition(g: GeneratedGroup) -> list[list[int]]:
    """Orbits on all points, each sorted, ordered by their smallest point."""
    gens = g.generator_matrix()
    done = np.zeros(g.degree, dtype=bool)
    out = []
    for u in range(g.degree):
        if done[u]:
            continue
        orb = _orbit_array(gens, g.degree, [u])
        done[orb] = True
        out.append([int(x) for x in orb])
    return out


@dataclass
class _Level:
    base_point: int
    generators: list[Permutation]
    transversal: dict[int, Permutation] = field(default_factory=dict)


class StabilizerChain:
    """Base, basic orbits with transversals, and strong generators.

    ``levels[i].transversal[x]`` maps ``base[i]`` to ``x`` and fixes
    ``base[:i]`` pointwise.
    """

    def __init__(self, degree: int, base: list[int], strong_generators: list[Permutation],
                 levels: list[_Level]):
        self.degree = degree
        self.base = base
        self.strong_generators = strong_generators
        self.levels = levels

    @property
    def basic_orbits(self) -> list[list[int]]:
        return [sorted(lv.transversal) for lv in self.levels]

    def order(self) -> int:
        n = 1
        for lv in self.levels:
            n *= len(lv.transversal)
            if n >= ORDER_LIMIT:
                raise OverflowError("group order exceeds 64-bit range")
        return n

    def sift(self, p: Permutation, start: int = 0) -> tuple[Permutation, int]:
        h = p
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            x = int(h._a[lv.base_point])
            t = lv.transversal.get(x)
            if t is None:
                return h, i
            if x != lv.base_point:
                h = compose(h, inverse(t))
        return h, len(self.levels)

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            raise ValueError("degree mismatch")
        h, _ = self.sift(p)
        return h.is_identity()

    def group(self) -> GeneratedGroup:
        gens = self.strong_generators or [Permutation.identity(self.degree)]
        return GeneratedGroup(self.degree, tuple(gens))

    def level_group(self, i: int) -> GeneratedGroup:
        """Stabilizer of ``base[:i]`` as a generated group."""
        if i < len(self.levels):
            gens = self.levels[i].generators
        else:
            gens = []
        return GeneratedGroup(self.degree, tuple(gens) or (Permutation.identity(self.degree),))


def build_chain(g: GeneratedGroup, declared_order: int | None = None,
                base_prefix: Sequence[int] = ()) -> StabilizerChain:
    """Deterministic Schreier-Sims.

    Base points beyond ``base_prefix`` are the smallest points moved by the
    first strong generator that fixes the current base.  A supplied
    ``declared_order`` stops the search as soon as it is reached and is
    checked at the end; a mismatch raises ``ValueError``.
    """
    degree = g.degree
    base = list(base_prefix)
    strong = [s for s in g.generators if not s.is_identity()]
    for s in strong:
        if all(int(s._a[b]) == b for b in base):
            base.append(int(s.moved_points()[0]))

    def fixes(s, upto):
        a = s._a
        return all(int(a[b]) == b for b in base[:upto])

    levels = [_Level(b, [s for s in strong if fixes(s, i)]) for i, b in enumerate(base)]
    ident = Permutation.identity(degree)
    for lv in levels:
        _rebuild(lv, ident)
    chain = StabilizerChain(degree, base, strong, levels)

    def reached():
        return declared_order is not None and chain.order() == declared_order

    i = len(levels) - 1
    while i >= 0 and not reached():
        lv = levels[i]
        restart = None
        for x, tx in list(lv.transversal.items()):
            for s in lv.generators:
                y = int(s._a[x])
                ts = compose(tx, s)
                ty = lv.transversal[y]
                if np.array_equal(ts._a, ty._a):
                    continue
                h = compose(ts, inverse(ty))
                r, j = chain.sift(h, i + 1)
                if r.is_identity():
                    continue
                strong.append(r)
                if j == len(levels):
                    moved = r.moved_points()
                    base.append(int(moved[0]))
                    levels.append(_Level(base[-1], []))
                for l in range(i + 1, j + 1):
                    levels[l].generators.append(r)
                    _rebuild(levels[l], ident)
                restart = j
                break
            if restart is not None:
                break
        if restart is not None:
            i = restart
        else:
            i -= 1

    # drop trailing levels with trivial orbits
    while levels and len(levels[-1].transversal) == 1:
        levels.pop()
        base.pop()
    if declared_order is not None and chain.order() != declared_order:
        raise ValueError(f"chain order {chain.order()} does not match declared order {declared_order}")
    return chain


def _rebuild(lv: _Level, ident: Permutation) -> None:
    b = lv.base_point
    trans = {b: ident}
    queue = [b]
    for x in queue:
        tx = trans[x]
        for s in lv.generators:
            y = int(s._a[x])
            if y not in trans:
                trans[y] = compose(tx, s)
                queue.append(y)
    lv.transversal = trans


def order(chain: StabilizerChain) -> int:
    return chain.order()


def contains(chain: StabilizerChain, p: Permutation) -> bool:
    return chain.contains(p)


def point_stabilizer(chain: StabilizerChain, u: int) -> GeneratedGroup:
    """Generators of the full stabilizer of ``u``, via a chain rebased at ``u``."""
    if not 0 <= u < chain.degree:
        raise ValueError("point out of range")
    if chain.base[:1] == [u]:
        return chain.level_group(1)
    rebased = build_chain(chain.group(), chain.order(), base_prefix=[u])
    return rebased.level_group(1)


def fixes_setwise(h: GeneratedGroup, gamma: KSubset) -> bool:
    pts = np.array(gamma.points(), dtype=np.int64)
    inside = np.zeros(h.degree, dtype=bool)
    inside[pts] = True
    return all(inside[g.array[pts]].all() for g in h.generators)


def is_transitive_on_product(h: GeneratedGroup, gamma: KSubset,
                             h_order: int | None = None,
                             chain: StabilizerChain | None = None) -> bool:
    """True iff ``h`` is transitive on ``gamma x (V minus gamma)``.

    ``h`` must fix ``gamma`` setwise.  The test is transitivity on ``gamma``
    plus transitivity of the stabilizer of ``min(gamma)`` on the complement.
    """
    assert fixes_setwise(h, gamma), "group does not fix the set"
    pts = gamma.points()
    comp = gamma.complement().points()
    if not pts or not comp:
        return False
    u, w = pts[0], comp[0]
    gens = h.generator_matrix()
    if _orbit_array(gens, h.degree, [u]).size != len(pts):
        return False
    if chain is None:
        chain = build_chain(h, h_order)
    stab = point_stabilizer(chain, u)
    return _orbit_array(stab.generator_matrix(), h.degree, [w]).size == len(comp)
