"""Repair one lost symbol of RS(5,3) with trace bits instead of whole bytes.

Run: python3 demos/02_repair_one_symbol.py
"""

from __future__ import annotations

import numpy as np

from rslab.galois import GF16, GF256
from rslab.grs import family_code
from rslab.repair import lift, naive_scheme, trace_repair
from rslab.search import SearchConfig, exhaustive_search

# search every check set of low-degree dual codewords over GF(16)
small = family_code("f16", 5, 3, GF16)
res = exhaustive_search(SearchConfig(small))
print("GF(16) profile (bits per erased position):", res.profile)

# lift onto the GF(256) code with the same points: bandwidth doubles, still below 8k
big = family_code("f16", 5, 3, GF256)
schemes = {j: lift(s, GF256, code=big) for j, s in res.schemes.items()}
print("GF(256) profile:", tuple(schemes[j].bandwidth for j in range(5)),
      " naive:", naive_scheme(big, 0).bandwidth)

word = [int(x) for x in big.random_codewords(1, np.random.default_rng(1))[0]]
lost = 2
s = schemes[lost]
print(f"\ncodeword {list(word)}, position {lost} erased")
print("helper ranks:", s.profile)
out = trace_repair(s, word)
for i, bits in sorted(out.sent.items()):
    print(f"  node {i} sends {len(bits)} bits: {''.join(map(str, bits))}")
print(f"recovered {out.value} (true {word[lost]}) from {out.bits} bits")
