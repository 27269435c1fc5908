"""Descending the maximal-subgroup tree of HS on 176 points.

Each maximal subgroup with two orbits on points is a candidate stabiliser:
it must be transitive on pairs (inside point, outside point) and be the
full stabiliser of its smaller orbit.  The point stabiliser passes both
tests trivially (k = 1 is outside the search range); two other classes
survive.

    python demos/02_chain_search_hs.py
"""

from jntcodes import engine
from jntcodes.catalog import find_entries, load_catalog
from jntcodes.perm import orbit_partition
from jntcodes.subsets import KSubset

hs = find_entries(load_catalog(), "HS/176")[0]
print(f"{hs.label}: order {hs.declared_order}")
for m in hs.maximal_subgroups:
    orbits = orbit_partition(m.group)
    sizes = sorted(map(len, orbits))
    note = ""
    if len(orbits) == 2:
        small = min(orbits, key=len)
        gamma = KSubset.from_points(hs.degree, small)
        sit = engine.sit_test_subgroup(m.group, gamma, m.declared_order)
        full = sit and engine.full_stabilizer_test(hs, m, gamma)
        note = f"sit={sit} full-stabiliser={full}"
    print(f"  {m.name:<22} index {hs.declared_order // m.declared_order:>6}  orbits {sizes if len(sizes) < 4 else len(sizes)}  {note}")

print()
for c in engine.chain_search(hs):
    print(f"code: k={c.k}, |orbit|={c.orbit_size}, stabiliser {c.stabilizer.name}")
