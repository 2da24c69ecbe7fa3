"""
Optimal bandwidth profiles of every RS(n, n-2) over GF(16).

Check sets are four distinct monic degree-one polynomials, the first kept
monic and the other three scaled by any nonzero GF(16) element:
C(16,4) * 15^3 = 6,142,500 sets.  Each set is scored once at all 16 points
(ranks over GF(2), packed 4 bits per point into a uint64).  Only a few
thousand distinct profiles survive, so the per-subset optimum reduces to a
small matrix product against subset indicator columns.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass
from math import comb
from typing import Iterator, Sequence

import numpy as np

from ..galois import GF2, GF16, gf2_rank, nibble_rank_table
from ..grs import GrsCode, classical_rs
from ..poly import Polynomial
from ..repair import RepairScheme, make_scheme

Q = 16
ELL = 4
SCALARS = np.arange(1, Q)
N_SCALAR_SETS = len(SCALARS) ** (ELL - 1)
_SHIFTS = (np.arange(Q) * 4).astype(np.uint64)


@dataclass
class RankProfileTable:
    """Distinct retained profiles, each with the smallest set id producing it."""

    packed: np.ndarray  # (U,) uint64, sorted
    first_id: np.ndarray  # (U,) int64
    enumerated: int
    retained: int

    def profiles(self) -> np.ndarray:
        return unpack(self.packed)

    def __len__(self) -> int:
        return len(self.packed)


def unpack(packed: np.ndarray) -> np.ndarray:
    return ((np.asarray(packed, dtype=np.uint64)[:, None] >> _SHIFTS) & np.uint64(15)).astype(np.int64)


def pack(ranks: np.ndarray) -> np.ndarray:
    return (np.asarray(ranks).astype(np.uint64) << _SHIFTS).sum(axis=-1, dtype=np.uint64)


def set_polys(set_id: int) -> list[Polynomial]:
    """Decode a set id: combination rank * 15^3 + scalar index."""
    combo_rank, s = divmod(int(set_id), N_SCALAR_SETS)
    roots = _combo_at(combo_rank)
    c2, rest = divmod(s, 15 * 15)
    c3, c4 = divmod(rest, 15)
    scal = (1, int(SCALARS[c2]), int(SCALARS[c3]), int(SCALARS[c4]))
    return [Polynomial(GF16, (a, 1)) * c for a, c in zip(roots, scal)]


def _combo_at(rank: int) -> tuple[int, ...]:
    return next(itertools.islice(itertools.combinations(range(Q), ELL), rank, None))


def iter_rank_profile_chunks(keep_all: bool = False) -> Iterator[tuple[np.ndarray, np.ndarray, int]]:
    """Yield (set ids, packed profiles, enumerated) per root combination.

    Sets with no full-rank point are dropped unless ``keep_all``.
    """
    f = GF16
    rank4 = nibble_rank_table()
    mt = f.mul_table.astype(np.int64)
    pts = np.arange(Q)
    lin = np.array([pts ^ a for a in range(Q)])  # x - a at every point
    grid = [g.ravel() for g in np.meshgrid(SCALARS, SCALARS, SCALARS, indexing="ij")]
    base_ids = np.arange(N_SCALAR_SETS, dtype=np.int64)
    for rank, (a, b, c, d) in enumerate(itertools.combinations(range(Q), ELL)):
        v1 = lin[a][None, :]
        v2 = mt[grid[0][:, None], lin[b]]
        v3 = mt[grid[1][:, None], lin[c]]
        v4 = mt[grid[2][:, None], lin[d]]
        rk = rank4[v1 | (v2 << 4) | (v3 << 8) | (v4 << 12)]
        keep = slice(None) if keep_all else (rk == ELL).any(axis=1)
        yield rank * N_SCALAR_SETS + base_ids[keep], pack(rk[keep]), rk.shape[0]


def build_rank_profile_table() -> RankProfileTable:
    """Stream every set once, keeping only distinct profiles."""
    packs, ids = [], []
    enumerated = retained = 0
    for set_ids, packed, count in iter_rank_profile_chunks():
        enumerated += count
        retained += len(packed)
        u, first = np.unique(packed, return_index=True)
        packs.append(u)
        ids.append(set_ids[first])
    allp, alli = np.concatenate(packs), np.concatenate(ids)
    order = np.lexsort((alli, allp))
    allp, alli = allp[order], alli[order]
    u, first = np.unique(allp, return_index=True)
    return RankProfileTable(u, alli[first], enumerated, retained)


_TABLE: RankProfileTable | None = None


def rank_profile_table() -> RankProfileTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = build_rank_profile_table()
    return _TABLE


@dataclass
class Census:
    n: int
    profiles: dict[tuple[int, ...], tuple[int, ...]]  # A -> bits per position of A
    best_ids: dict[tuple[int, ...], tuple[int, ...]]  # A -> set id achieving each entry

    @property
    def classes(self) -> Counter:
        return Counter(tuple(sorted(p, reverse=True)) for p in self.profiles.values())


def optimal_profiles(n: int, table: RankProfileTable | None = None) -> Census:
    if not 4 <= n <= Q:
        raise ValueError("n must lie in [4, 16]")
    table = table if table is not None else rank_profile_table()
    prof = table.profiles()
    best: dict[tuple[int, tuple[int, ...]], tuple[int, int]] = {}
    for t in range(Q):
        rows = np.flatnonzero(prof[:, t] == ELL)
        sel = prof[rows].astype(np.float32)
        others = [p for p in range(Q) if p != t]
        subs = list(itertools.combinations(others, n - 1))
        ind = np.zeros((Q, len(subs)), dtype=np.float32)
        for si, s in enumerate(subs):
            ind[list(s), si] = 1
        sums = sel @ ind  # exact: small integers
        arg = sums.argmin(axis=0)
        for si, s in enumerate(subs):
            best[(t, s)] = (int(sums[arg[si], si]), int(table.first_id[rows[arg[si]]]))
    profiles, ids = {}, {}
    for A in itertools.combinations(range(Q), n):
        entries = [best[(j, tuple(x for x in A if x != j))] for j in A]
        profiles[A] = tuple(e[0] for e in entries)
        ids[A] = tuple(e[1] for e in entries)
    return Census(n, profiles, ids)


def census_code(A: Sequence[int]) -> GrsCode:
    return classical_rs(GF16, A, len(A) - 2, name="census")


def scheme_for(census: Census, A: Sequence[int], j: int) -> RepairScheme:
    """Rebuild the optimal scheme for position j of RS(A, n-2) over GF(16)."""
    key = tuple(sorted(A))
    code = census_code(key)
    s = make_scheme(code, j, set_polys(census.best_ids[key][j]), GF2)
    assert s.bandwidth == census.profiles[key][j]
    return s


def direct_profile(A: Sequence[int]) -> tuple[int, ...]:
    """Per-A oracle: rank every set at the points of A only, by XOR-basis elimination."""
    f = GF16
    pts = np.asarray(A, dtype=np.int64)
    n = len(pts)
    mt = f.mul_table.astype(np.int64)
    grid = np.array(list(itertools.product(range(1, Q), repeat=ELL - 1)), dtype=np.int64)
    cs = np.hstack([np.ones((len(grid), 1), dtype=np.int64), grid])  # (S, 4)
    best = np.full(n, np.iinfo(np.int64).max)
    for roots in itertools.combinations(range(Q), ELL):
        lin = pts[None, :] ^ np.asarray(roots)[:, None]  # (4, n)
        vals = mt[cs[:, :, None], lin[None, :, :]]  # (S, 4, n)
        rk = gf2_rank(vals.transpose(0, 2, 1), 4)  # (S, n)
        full = rk == ELL
        bw = rk.sum(axis=1, keepdims=True) - ELL
        best = np.minimum(best, np.where(full, bw, best).min(axis=0))
    return tuple(int(b) for b in best)


def affine_orbit(A: Sequence[int], f=GF16) -> set[frozenset[int]]:
    """Every beta*A + gamma as an unordered set."""
    out = set()
    for beta in range(1, f.order):
        for gamma in range(f.order):
            out.add(frozenset(f.mul(beta, a) ^ gamma for a in A))
    return out


def affine_arrangements(A: Sequence[int], f=GF16) -> set[tuple[int, ...]]:
    """Every beta*A + gamma as an ordered tuple; q(q-1) of them once |A| >= 2."""
    return {tuple(f.mul(beta, a) ^ gamma for a in A) for beta in range(1, f.order) for gamma in range(f.order)}


def same_code_arrangements(A: Sequence[int], k: int, f=GF16) -> int:
    """Ordered n-tuples A' of distinct points with RS(A', k) equal to RS(A, k) as codeword sets.

    A' qualifies iff every row x^i (i < k) of its Vandermonde matrix lies in
    the null space of the parity check of RS(A, k).
    """
    code = classical_rs(f, A, k)
    H = code.parity_check()
    n = len(A)
    mt = f.mul_table.astype(np.int64)
    tuples = np.array(list(itertools.permutations(range(f.order), n)), dtype=np.int64)
    ok = np.ones(len(tuples), dtype=bool)
    powers = np.ones_like(tuples)
    for _ in range(k):
        for row in H.rows:
            acc = np.zeros(len(tuples), dtype=np.int64)
            for j in range(n):
                acc ^= mt[int(row[j]), powers[:, j]]
            ok &= acc == 0
        powers = mt[powers, tuples]
    return int(ok.sum())


def count_arrangements(n: int, q: int = Q) -> int:
    return comb(q, n) * int(np.prod(np.arange(1, n + 1)))


def write_census_csv(census: Census) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "A", "profile"])
    for A in sorted(census.profiles):
        w.writerow([census.n, ";".join(map(str, A)), ";".join(map(str, census.profiles[A]))])
    return buf.getvalue()
