"""
Degree-four repair search for codes over GF(256): pairs over GF(16), quadruples over GF(4), then GF(2).

Stage 1 lists pairs of candidates, scored as schemes over GF(16).  Stage 2
forms quadruples (P1, P2, d*Q1, d*Q2) from two listed pairs and scores them
over GF(4).  Stage 3 extends the winners to base GF(2) and verifies them.

GF(4)-spans at each evaluation point are held as 256-bit membership sets, so
the rank of a quadruple is dim S + dim T - log2 |S & T| with no elimination.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from ..galois import GF2, GF4, GF16, GF256
from ..poly import Polynomial
from ..repair import RepairScheme, extend, make_scheme, verify_scheme
from .candidates import coset_reps, evaluation_matrix, gen_candidates
from .exhaustive import SearchConfig, SearchResult
from .tables import reference

log = logging.getLogger(__name__)

DEFAULT_PAIR_CAP = 256  # per position; keeps stage 2 quadratic cost bounded for r = 4

_LOG2 = np.zeros(257, dtype=np.int64)
for _d in range(9):
    _LOG2[1 << _d] = _d


@dataclass
class PairList:
    """Stage-1 survivors: pair t is (monic[first[t]], scalar[t] * monic[second[t]])."""

    first: np.ndarray
    second: np.ndarray
    scalar: np.ndarray
    values: np.ndarray  # (L, 2, n)
    bits: np.ndarray  # (L, n) pair bandwidth in bits where full rank, else -1

    def __len__(self) -> int:
        return len(self.first)


def default_thetas(code, theta2: int | None, theta4: int | None) -> tuple[int, int]:
    if theta2 is None:
        theta2 = 8 * code.k - 8  # naive pair (2k nibbles) less two nibbles
    if theta4 is None:
        ref = reference(code.n, code.r, "isal")
        theta4 = ref if ref is not None and ref < theta2 else theta2 - 2
    if not theta4 < theta2:
        raise ValueError("theta4 must be below theta2")
    return theta2, theta4


def gf16_pair_ranks(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """rank over GF(16) of {a, b} elementwise in GF(256)."""
    f = GF256
    la = f.log_table[a].astype(np.int64)
    lb = f.log_table[b].astype(np.int64)
    za, zb = a == 0, b == 0
    ratio_in_sub = (la - lb) % 17 == 0
    r = np.where(za & zb, 0, np.where(za | zb | ratio_in_sub, 1, 2))
    return r


def pair_stage(code, theta2: int, cap: int | None = None) -> tuple[PairList, list[Polynomial]]:
    f = code.field
    monic = list(gen_candidates(f, code.A, code.r, "monic"))
    vals = evaluation_matrix(monic, code.A)
    reps = np.array(coset_reps(f, GF16), dtype=np.int64)
    C, n = vals.shape
    iu, ju = np.triu_indices(C)
    first = np.repeat(iu, len(reps))
    second = np.repeat(ju, len(reps))
    scal = np.tile(reps, len(iu))
    a = vals[first]
    b = f.mul_table[scal[:, None], vals[second]].astype(np.int64)
    ranks = gf16_pair_ranks(a, b)
    full = ranks == 2
    bw = ranks.sum(axis=1)[:, None] - 2
    bits = np.where(full, 4 * bw, -1)
    ok = full & (bits <= theta2)
    keep = np.zeros(len(first), dtype=bool)
    for j in range(n):
        hit = np.flatnonzero(ok[:, j])
        if cap is not None and len(hit) > cap:
            order = np.lexsort((hit, bits[hit, j]))
            hit = hit[order[:cap]]
        keep[hit] = True
    idx = np.flatnonzero(keep)
    best = np.where(ok[idx], bits[idx], np.iinfo(np.int64).max).min(axis=1)
    idx = idx[np.lexsort((idx, best))]
    return PairList(first[idx], second[idx], scal[idx], np.stack([a[idx], b[idx]], axis=1), bits[idx]), monic


def _span_sets(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """GF(4)-span of the pair values at every point, as (..., 4) uint64 bitsets plus GF(2) dims."""
    f = GF256
    omega = f.exp_to_int(85)
    gens = np.stack([values[..., 0, :], f.mul_table[omega, values[..., 0, :]],
                     values[..., 1, :], f.mul_table[omega, values[..., 1, :]]], axis=-1).astype(np.int64)
    elems = np.zeros(gens.shape[:-1] + (16,), dtype=np.int64)
    for mask in range(16):
        acc = np.zeros(gens.shape[:-1], dtype=np.int64)
        for t in range(4):
            if mask >> t & 1:
                acc ^= gens[..., t]
        elems[..., mask] = acc
    member = np.zeros(gens.shape[:-1] + (256,), dtype=bool)
    np.put_along_axis(member, elems, True, axis=-1)
    counts = member.sum(axis=-1)
    packed = np.packbits(member, axis=-1, bitorder="little").view(np.uint64)
    return packed, _LOG2[counts]


def degree_four_search(cfg: SearchConfig) -> SearchResult:
    t0 = time.perf_counter()
    code = cfg.code
    if code.field is not GF256:
        raise ValueError("degree-four search needs a code over GF(256)")
    theta2, theta4 = default_thetas(code, cfg.theta2, cfg.theta4)
    n = code.n
    pairs, monic = pair_stage(code, theta2, cfg.candidate_cap or DEFAULT_PAIR_CAP)
    res = SearchResult(code, GF2, {}, notes=[f"theta2={theta2} theta4={theta4}", "best under A1/A2"])
    if not len(pairs):
        res.notes.append(f"no pair reaches theta2={theta2}; every position uncovered")
        log.warning(res.notes[-1])
        res.elapsed = time.perf_counter() - t0
        return res

    f = GF256
    deltas = np.array(coset_reps(f, GF4), dtype=np.int64)
    L, D = len(pairs), len(deltas)
    sp, dp = _span_sets(pairs.values)  # (L, n, 4), (L, n)
    sq = np.empty((L, D, n, 4), dtype=np.uint64)
    for lo in range(0, L, 32):
        scaled = f.mul_table[deltas[None, :, None, None], pairs.values[lo : lo + 32, None]].astype(np.int64)
        sq[lo : lo + 32] = _span_sets(scaled)[0]

    best_bw = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    best_key = np.zeros((n, 3), dtype=np.int64)
    examined = passed = 0
    for p in range(L):
        inter = np.bitwise_count(sq & sp[p]).sum(axis=-1, dtype=np.int64)
        rank2 = dp[p][None, None, :] + dp[:, None, :] - _LOG2[inter]
        full = rank2 == 8
        bits = rank2.sum(axis=-1) - 8  # two bits per GF(4) symbol: sum(rank2)/2 - 4, doubled
        examined += L * D
        passed += int(np.count_nonzero(full.any(axis=-1)))
        cand = np.where(full, bits[..., None], np.iinfo(np.int64).max).reshape(L * D, n)
        arg = cand.argmin(axis=0)
        for j in range(n):
            b = int(cand[arg[j], j])
            if b < best_bw[j]:
                best_bw[j] = b
                best_key[j] = (p, *divmod(int(arg[j]), D))
        if np.all(best_bw <= theta4):
            break
    res.examined, res.passed = examined, passed
    res.complete = bool(np.all(best_bw <= theta4))

    for j in range(n):
        if best_bw[j] > theta2:
            continue
        p, q, d = (int(x) for x in best_key[j])
        polys = _pair_polys(monic, pairs, p) + [g * int(deltas[d]) for g in _pair_polys(monic, pairs, q)]
        s4 = make_scheme(code, j, polys, GF4)
        assert s4.bandwidth == best_bw[j], (j, s4.bandwidth, best_bw[j])
        s2 = extend(s4, GF2)
        if cfg.verify_trials and not verify_scheme(s2, cfg.verify_trials, cfg.seed):
            raise AssertionError(f"degree-four scheme fails verification at position {j}")
        res.schemes[j] = s2
    above = [j for j in range(n) if best_bw[j] > theta4]
    if above:
        res.notes.append(f"positions {above} stay above theta4={theta4}")
        log.warning(res.notes[-1])
    res.elapsed = time.perf_counter() - t0
    return res


def _pair_polys(monic: list[Polynomial], pairs: PairList, t: int) -> list[Polynomial]:
    return [monic[int(pairs.first[t])], monic[int(pairs.second[t])] * int(pairs.scalar[t])]


def pair_scheme(code, monic, pairs: PairList, t: int, target: int) -> RepairScheme:
    return make_scheme(code, target, _pair_polys(monic, pairs, t), GF16)
