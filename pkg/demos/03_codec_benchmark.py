"""Compile RS(9,6) schemes into lookup tables and race them against the naive repair.

Run: python3 demos/03_codec_benchmark.py [codewords]
"""

from __future__ import annotations

import sys

from rslab import codec as cd
from rslab.grs import family_code
from rslab.search import SearchConfig, degree_four_search
from rslab.search.tables import format_reduction

count = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
code = family_code("isal", 9, 6)

# degree-four search: pairs over GF(16), then quadruples, then read back over GF(2)
res = degree_four_search(SearchConfig(code))
schemes = res.ordered_schemes()
print("bits per position:", tuple(s.bandwidth for s in schemes),
      " worst:", res.max_bandwidth, format_reduction(res.max_bandwidth, code.k))

tables = cd.compile_tables(schemes)
print("table image:", len(tables.to_bytes()), "bytes")

rep = cd.bench(code, tables, count, seed=0)
print()
print(rep.to_csv(), end="")
print(f"\nexact: {rep.exact}  bits trace/naive: {rep.bits['trace']}/{rep.bits['naive']}"
      f"  time ratio trace/naive: {rep.ratio():.2f}")
