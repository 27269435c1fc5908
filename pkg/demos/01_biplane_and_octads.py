"""A first look: two small codes from the bundled catalog.

The 11 blocks of the biplane on 11 points form one orbit of PSL(2,11) on
5-subsets.  Any two blocks share exactly two points, so the minimum Johnson
distance is 3.  The octads of M24 are the classic constant-weight example.

    python demos/01_biplane_and_octads.py
"""

from collections import Counter

from jntcodes import analysis as an
from jntcodes import engine
from jntcodes.catalog import find_entries, load_catalog
from jntcodes.subsets import intersection_size

catalog = load_catalog()
l211 = find_entries(catalog, "L2(11)/11")[0]

(biplane,) = engine.exhaustive_search(l211, 5)
code = an.Code.from_candidate(biplane)
words = code.words()
print("biplane blocks:", " ".join(str(w) for w in words[:4]), "...")
print("pairwise meets:", Counter(intersection_size(a, b) for a in words for b in words if a != b))
print("delta =", an.min_distance(code), " 2-design lambda =", an.design_lambda(code, 2))

m24 = find_entries(catalog, "M24/24")[0]
(octads,) = engine.exhaustive_search(m24, 8)
oc = an.Code.from_candidate(octads)
print()
print(f"M24 octads: {len(oc)} words, delta {an.min_distance(oc)}")
# every 5-subset of the 24 points lies in exactly one octad
print("5-design lambda:", an.design_lambda(oc, 5))
print("distance profile from one octad:",
      sorted(Counter(8 - int(x) for x in an.ss.popcounts(oc.rows[1:] & oc.rows[0])).items()))
