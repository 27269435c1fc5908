"""Johnson codes as binary constant-weight codes.

A k-subset is a weight-k word of length v, and Johnson distance d becomes
Hamming distance 2d.  Writes three exports into ./exports and checks the
Hamming distance directly on the written words.

    python demos/04_hamming_embedding.py
"""

from pathlib import Path

from jntcodes import analysis as an
from jntcodes.cli import main

out = Path("exports")
for line in (3, 7, 16):
    main(["export", "--line", str(line), "--out", str(out), "--workers", "1"])

for path in sorted(out.glob("*.txt")):
    header, words = an.read_hamming(path.read_text())
    print(f"{path.name}: length {len(words[0])}, {len(words)} words, "
          f"min Hamming distance {an.hamming_min_distance(words)} (header {header['min_hamming_distance']})")
