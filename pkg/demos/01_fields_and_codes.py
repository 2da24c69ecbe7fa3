"""Walk through the field tower and the four industry encoders.

Run: python3 demos/01_fields_and_codes.py
"""

from __future__ import annotations

from rslab.galois import GF2, GF16, GF256, embedding
from rslab.grs import (backblaze_code, cauchy_systematic, cauchy_to_grs, classical_rs, find_vand_systematic_failure,
                       int_points, is_mds, vand_systematic)

z = GF256.exp_to_int

# GF(256) is built from x^8+x^4+x^3+x^2+1; a few powers of the generator z
print("z^25 =", z(25), " z^229 =", z(229), " z^198 =", z(198))
print("trace to GF(2) of z^7:", GF256.trace(z(7), GF2))

# GF(16) sits inside GF(256) as the powers of z^17
emb = embedding(GF16, GF256)
print("GF(16) generator maps to", emb(2), "= z^%d" % GF256.int_to_exp(emb(2)))

# ISA-L style systematic Cauchy encoder for RS(9,6)
G = cauchy_systematic(9, 6)
print("\nCauchy parity block of RS(9,6):")
for row in G.rows[:, 6:]:
    print("   ", " ".join(f"{int(x):3d}" for x in row))

# the same code in evaluation-point form
code = cauchy_to_grs(9, 6)
print("points  :", code.A)
print("lambda  :", [f"z^{GF256.int_to_exp(x)}" for x in code.lam])
print("same code as the Cauchy encoder:", code.same_code(G))

# Backblaze's encoder spans plain RS on the points 0..n-1
for n, k in ((9, 6), (14, 10)):
    rs = classical_rs(GF256, int_points(n), k).generator()
    print(f"Backblaze({n},{k}) equals RS([0,{n - 1}],{k}):", backblaze_code(n, k).same_code(rs))

# a Vandermonde "systematic" matrix is not MDS in general
print("\nvand-systematic(9,6) MDS:", is_mds(vand_systematic(9, 6)))
n, k, (rows, cols) = find_vand_systematic_failure()
print(f"first failure at n={n}, k={k}: singular minor rows={rows} cols={cols}")
