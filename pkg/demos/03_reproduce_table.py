"""Reproduce the full classification and print the comparison table.

Degrees up to 24 use the exhaustive orbit sweep, HS and Co3 the subgroup
descent.  Expect a few minutes on one core; the Co3 orbit of 708400
6-subsets is the largest object built.

    python demos/03_reproduce_table.py
"""

import time

from jntcodes import analysis as an
from jntcodes.catalog import load_catalog
from jntcodes.cli import RunConfig, classify_all

catalog = load_catalog()
t0 = time.time()
results = classify_all(RunConfig("verify-table", workers=1), catalog, catalog)
records = [r for g in results for r in g.records]
report = an.reproduce_table(records)
print(report.tsv(), end="")
print(f"\n{len(records)} codes in {time.time() - t0:.0f}s; table reproduced: {report.ok}")
print("distance >= 3:", report.distance3_lines)
print("distance == 2:", report.distance2_lines)
