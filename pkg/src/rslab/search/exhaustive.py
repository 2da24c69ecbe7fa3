"""
Exhaustive search over canonical check sets.

A canonical set is a nondecreasing run of ell monic candidates (ell = [F:K])
with the first kept monic and every other one scaled by a representative of
F*/K*.  Each set gets one rank profile, and every position where it has full
rank is offered the set's bandwidth.  The per-position best is a
min-reduction over (bandwidth, global set index), so splitting the index
range across workers cannot change the answer.
"""

from __future__ import annotations

import itertools
import logging
import os
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from ..galois import GF, GF2, field as get_field, nibble_rank_table, rank_over_batch
from ..grs import GrsCode, format_code
from ..poly import Polynomial
from ..repair import RepairScheme, format_schemes, lift, make_scheme, verify_scheme, write_atomic
from .candidates import coset_reps, evaluation_matrix, gen_candidates

log = logging.getLogger(__name__)

NO_SCHEME = np.iinfo(np.int64).max


class SearchInterrupted(RuntimeError):
    pass


@dataclass
class SearchConfig:
    code: GrsCode
    base: GF = GF2
    theta2: int | None = None  # bits
    theta4: int | None = None  # bits
    candidate_cap: int | None = None
    workers: int = 1
    checkpoint: str | None = None
    checkpoint_interval: int = 512  # candidate runs per round
    seed: int = 0
    scalar_policy: str = "all"
    target_bandwidth: int | None = None  # bits; stop once every position meets it
    resume: bool = False
    verify_trials: int = 100

    def __post_init__(self):
        if self.theta2 is not None and self.theta4 is not None and not self.theta4 < self.theta2:
            raise ValueError("theta4 must be below theta2")
        if self.workers < 1:
            raise ValueError("need at least one worker")

    @property
    def ell(self) -> int:
        return self.code.field.degree_over(self.base)


@dataclass
class SearchResult:
    code: GrsCode
    base: GF
    schemes: dict[int, RepairScheme]
    examined: int = 0
    passed: int = 0
    elapsed: float = 0.0
    complete: bool = True
    cursor: int = 0
    notes: list[str] = dc_field(default_factory=list)

    @property
    def profile(self) -> tuple[int | None, ...]:
        return tuple(self.schemes[j].bandwidth if j in self.schemes else None for j in range(self.code.n))

    @property
    def uncovered(self) -> list[int]:
        return [j for j in range(self.code.n) if j not in self.schemes]

    @property
    def max_bandwidth(self) -> int | None:
        if self.uncovered:
            return None
        return max(s.bandwidth for s in self.schemes.values())

    def ordered_schemes(self) -> list[RepairScheme]:
        return [self.schemes[j] for j in sorted(self.schemes)]


@dataclass(frozen=True)
class _Space:
    """Everything a worker needs; plain arrays so it pickles cheaply."""

    field_name: str
    base_name: str
    values: np.ndarray  # (C, n) candidate evaluations
    scalars: np.ndarray  # (S, ell) scalar tuples, first column all ones
    ell: int
    reps: tuple[int, ...]

    @property
    def n_candidates(self) -> int:
        return self.values.shape[0]

    def combos(self, lo: int = 0, hi: int | None = None):
        it = itertools.combinations_with_replacement(range(self.n_candidates), self.ell)
        return itertools.islice(it, lo, hi)


def count_runs(n_candidates: int, ell: int) -> int:
    from math import comb

    return comb(n_candidates + ell - 1, ell)


def build_space(cfg: SearchConfig, candidates: Sequence[Polynomial] | None = None) -> tuple[_Space, list[Polynomial]]:
    code = cfg.code
    if candidates is None:
        candidates = list(gen_candidates(code.field, code.A, code.r, "monic"))
    reps = coset_reps(code.field, cfg.base) if cfg.scalar_policy == "all" else [1]
    grid = list(itertools.product(reps, repeat=cfg.ell - 1))
    scalars = np.array([(1,) + g for g in grid], dtype=np.int64)
    space = _Space(code.field.name, cfg.base.name, evaluation_matrix(candidates, code.A), scalars, cfg.ell,
                   tuple(reps))
    return space, list(candidates)


def _scan(space: _Space, lo: int, hi: int, batch: int = 32):
    """Best (bandwidth in base symbols, global index) per position over runs [lo, hi)."""
    f, base = get_field(space.field_name), get_field(space.base_name)
    n = space.values.shape[1]
    S = space.scalars.shape[0]
    ell = space.ell
    reps = space.reps
    R = len(reps)
    # scaled[c, t, j] = reps[t] * candidate_c(a_j)
    scaled = f.mul_table[np.asarray(reps)[None, :, None], space.values[:, None, :]].astype(np.int32)
    nibble = f.m == 4 and base.m == 1
    rank4 = nibble_rank_table()
    best_bw = np.full(n, NO_SCHEME, dtype=np.int64)
    best_idx = np.full(n, NO_SCHEME, dtype=np.int64)
    examined = passed = 0
    it = space.combos(lo, hi)
    pos = lo
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            break
        idx = np.asarray(chunk, dtype=np.int64)  # (B, ell)
        B = idx.shape[0]
        # axis layout (B, t_2, ..., t_ell, n), matching itertools.product order
        terms = [space.values[idx[:, 0]].astype(np.int32).reshape((B,) + (1,) * (ell - 1) + (n,))]
        for i in range(1, ell):
            shape = [B] + [1] * (ell - 1) + [n]
            shape[i] = R
            terms.append(scaled[idx[:, i]].reshape(shape))
        if nibble:
            packed = terms[0]
            for i in range(1, ell):
                packed = packed | (terms[i] << (4 * i))
            ranks = rank4[packed]
        else:
            ranks = rank_over_batch(f, np.stack(np.broadcast_arrays(*terms), axis=-1), base)
        ranks = ranks.reshape(B * S, n)
        total = ranks.sum(axis=1, dtype=np.int64)
        full = ranks == ell
        examined += ranks.shape[0]
        passed += int(np.count_nonzero(full.any(axis=1)))
        offset = pos * S
        cand = np.where(full, (total - ell)[:, None], NO_SCHEME)
        arg = np.argmin(cand, axis=0)
        for j in range(n):
            t = int(arg[j])
            bw = int(cand[t, j])
            if bw != NO_SCHEME and (bw < best_bw[j] or (bw == best_bw[j] and offset + t < best_idx[j])):
                best_bw[j], best_idx[j] = bw, offset + t
        pos += B
    return best_bw, best_idx, examined, passed


def merge(a, b):
    """Associative, commutative min-merge of two partial scan results."""
    bw = np.minimum(a[0], b[0])
    take_b = (b[0] < a[0]) | ((b[0] == a[0]) & (b[1] < a[1]))
    idx = np.where(take_b, b[1], a[1])
    return bw, idx, a[2] + b[2], a[3] + b[3]


def decode_index(space: _Space, candidates: Sequence[Polynomial], gidx: int) -> list[Polynomial]:
    S = space.scalars.shape[0]
    ci, si = divmod(int(gidx), S)
    combo = next(space.combos(ci, ci + 1))
    return [candidates[c] * int(s) for c, s in zip(combo, space.scalars[si])]


# checkpoints

CK_MAGIC = b"RSCK"
CK_VERSION = 1


def write_checkpoint(path: str, code: GrsCode, cursor: int, state, schemes: Sequence[RepairScheme]) -> None:
    bw, idx, examined, passed = state
    n = code.n
    out = bytearray(CK_MAGIC)
    out += struct.pack("<HHQQQ", CK_VERSION, n, cursor, examined, passed)
    for j in range(n):
        out += struct.pack("<qq", int(bw[j]), int(idx[j]))
    text = format_schemes(code, schemes).encode()
    out += struct.pack("<I", len(text)) + text
    write_atomic(path, bytes(out))


def read_checkpoint(path: str, code: GrsCode):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != CK_MAGIC:
        raise ValueError("not a search checkpoint")
    version, n, cursor, examined, passed = struct.unpack_from("<HHQQQ", data, 4)
    if version != CK_VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    off = 4 + struct.calcsize("<HHQQQ")
    bw = np.zeros(n, dtype=np.int64)
    idx = np.zeros(n, dtype=np.int64)
    for j in range(n):
        bw[j], idx[j] = struct.unpack_from("<qq", data, off)
        off += 16
    (length,) = struct.unpack_from("<I", data, off)
    text = data[off + 4 : off + 4 + length].decode()
    if text.splitlines()[1] != format_code(code):
        raise ValueError("checkpoint belongs to a different code")
    return cursor, (bw, idx, int(examined), int(passed))


def exhaustive_search(cfg: SearchConfig, candidates: Sequence[Polynomial] | None = None) -> SearchResult:
    t0 = time.perf_counter()
    code, base = cfg.code, cfg.base
    space, candidates = build_space(cfg, candidates)
    total_runs = count_runs(space.n_candidates, space.ell)
    n = code.n
    init = (np.full(n, NO_SCHEME, dtype=np.int64), np.full(n, NO_SCHEME, dtype=np.int64), 0, 0)
    state, cursor = init, 0
    if cfg.resume and cfg.checkpoint and os.path.exists(cfg.checkpoint):
        cursor, state = read_checkpoint(cfg.checkpoint, code)
        log.info("resuming at run %d of %d", cursor, total_runs)

    def met_target(st) -> bool:
        if cfg.target_bandwidth is None:
            return False
        return bool(np.all(st[0] * base.m <= cfg.target_bandwidth))

    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    step = cfg.checkpoint_interval * cfg.workers
    try:
        while cursor < total_runs and not met_target(state):
            hi = min(cursor + step, total_runs)
            if pool is None:
                parts = [_scan(space, cursor, hi)]
            else:
                bounds = np.linspace(cursor, hi, cfg.workers + 1).astype(int)
                futs = [pool.submit(_scan, space, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
                parts = [f.result() for f in futs]
            for p in parts:
                state = merge(state, p)
            cursor = hi
            if cfg.checkpoint:
                write_checkpoint(cfg.checkpoint, code, cursor, state, _schemes(cfg, space, candidates, state, False).values())
    except KeyboardInterrupt:
        if not cfg.checkpoint:
            raise SearchInterrupted("search interrupted without a checkpoint; progress lost") from None
        write_checkpoint(cfg.checkpoint, code, cursor, state, _schemes(cfg, space, candidates, state, False).values())
        raise SearchInterrupted(f"search interrupted; checkpoint saved at run {cursor}") from None
    finally:
        if pool is not None:
            pool.shutdown()

    schemes = _schemes(cfg, space, candidates, state, True)
    res = SearchResult(
        code, base, schemes, state[2], state[3], time.perf_counter() - t0, cursor >= total_runs, cursor
    )
    if cfg.target_bandwidth is not None and not met_target(state):
        res.notes.append(f"target bandwidth {cfg.target_bandwidth} not met at positions "
                         f"{[j for j in range(n) if state[0][j] * base.m > cfg.target_bandwidth]}")
        log.warning(res.notes[-1])
    return res


def _schemes(cfg, space, candidates, state, verify: bool) -> dict[int, RepairScheme]:
    out = {}
    bw, idx = state[0], state[1]
    for j in range(cfg.code.n):
        if bw[j] == NO_SCHEME:
            continue
        s = make_scheme(cfg.code, j, decode_index(space, candidates, idx[j]), cfg.base)
        assert s.bandwidth == bw[j] * cfg.base.m
        if verify and cfg.verify_trials and not verify_scheme(s, cfg.verify_trials, cfg.seed):
            raise AssertionError(f"search produced a scheme that fails verification at {j}")
        out[j] = s
    return out


def lift_result(res: SearchResult, target_field: GF, basis: Sequence[int] | None = None) -> SearchResult:
    schemes = {j: lift(s, target_field, basis) for j, s in res.schemes.items()}
    code = next(iter(schemes.values())).code if schemes else res.code
    return SearchResult(code, res.base, schemes, res.examined, res.passed, res.elapsed, res.complete, res.cursor,
                        list(res.notes))
