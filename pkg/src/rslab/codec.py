"""
Lookup-table trace repair over GF(256), plus the naive baseline and a bench.

For target j each helper i picks an echelon GF(2)-basis mu_1..mu_r of the
span of its dual entries and ships r bits Tr(mu_s c_i).  The tables:

    H[i][j] = (r_i, mask(mu_1), ..., mask(mu_r))   sp[mask & x] == Tr(mu x)
    R[i][j][s]  which received bits sum to Tr(e_s c_i), e_s the s-th entry
    D[j]        dual basis of the entries at the target

so c_j = XOR_s (XOR_i sp[R[i][j][s] & Dec(trace_i)]) * D[j][s].

Stripes use the baseline layout: symbol i of codeword t sits at offset t of
buffer i, so a batch of T codewords is an (n, T) uint8 array.
"""

from __future__ import annotations

import csv
import io
import struct
import time
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .galois import GF2, GF256, dual_basis, gf2_echelon, gf2_solve, mat_inv
from .grs import CodeError, GeneratorMatrix, GrsCode
from .repair import RepairScheme, UnverifiedSchemeError, verify_scheme

TABLE_MAGIC = b"RSLT1"
_HEADER = struct.Struct("<5sHHB")


def build_sp() -> np.ndarray:
    """sp[m] = XOR of the 8 bits of m."""
    m = np.arange(256, dtype=np.uint8)
    return (np.unpackbits(m[:, None], axis=1).sum(axis=1) & 1).astype(np.uint8)


SP = build_sp()


def trace_mask(mu: int, f=GF256) -> int:
    """Byte M with sp[M & x] == Tr(mu * x) for every x: bit t is Tr(mu z^t)."""
    tt = f.trace_table(GF2)
    return sum(int(tt[f.mul(mu, 1 << t)]) << t for t in range(f.m))


@dataclass(frozen=True)
class RepairTrace:
    bits: tuple[int, ...]

    @property
    def value(self) -> int:
        return dec(self.bits)

    def __len__(self) -> int:
        return len(self.bits)


def dec(bits: Sequence[int]) -> int:
    """Bit s of the result is trace bit s."""
    if len(bits) > 8:
        raise ValueError("at most 8 trace bits")
    return sum((int(b) & 1) << s for s, b in enumerate(bits))


@dataclass(frozen=True, eq=False)
class LookupTables:
    code: GrsCode
    H: np.ndarray  # (n, n, 9) uint8
    R: np.ndarray  # (n, n, 8) uint8
    D: np.ndarray  # (n, 8) uint8
    schemes: tuple[RepairScheme, ...] = dc_field(default=(), compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    def rank(self, i: int, j: int) -> int:
        return int(self.H[i, j, 0])

    def bandwidth(self, j: int) -> int:
        """Bits received when repairing position j."""
        return int(sum(self.H[i, j, 0] for i in range(self.n) if i != j))

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(TABLE_MAGIC, self.n, self.k, self.code.field.m)
        return head + self.H.tobytes() + self.R.tobytes() + self.D.tobytes()

    @cached_property
    def fused(self) -> np.ndarray:
        """F[j, i, v]: contribution of helper i to c_j when it sends Dec value v."""
        n = self.n
        mt = GF256.mul_table
        out = np.zeros((n, n, 256), dtype=np.uint8)
        v = np.arange(256, dtype=np.uint8)
        for j in range(n):
            for i in range(n):
                if i == j:
                    continue
                acc = np.zeros(256, dtype=np.uint8)
                for s in range(8):
                    bit = SP[self.R[i, j, s] & v]
                    acc ^= mt[self.D[j, s]][bit]
                r = self.rank(i, j)
                acc[1 << r :] = 0  # unreachable Dec values
                out[j, i] = acc
        out.setflags(write=False)
        return out


def read_tables(data: bytes, code: GrsCode) -> LookupTables:
    magic, n, k, fid = _HEADER.unpack_from(data)
    if magic != TABLE_MAGIC:
        raise ValueError("not a compiled table file")
    if (n, k, fid) != (code.n, code.k, code.field.m):
        raise ValueError("table file does not match the code")
    off = _HEADER.size
    sizes = (n * n * 9, n * n * 8, n * 8)
    if len(data) != off + sum(sizes):
        raise ValueError("truncated table file")
    H = np.frombuffer(data, np.uint8, sizes[0], off).reshape(n, n, 9)
    R = np.frombuffer(data, np.uint8, sizes[1], off + sizes[0]).reshape(n, n, 8)
    D = np.frombuffer(data, np.uint8, sizes[2], off + sizes[0] + sizes[1]).reshape(n, 8)
    return LookupTables(code, H.copy(), R.copy(), D.copy())


def compile_tables(schemes: Sequence[RepairScheme], verify_trials: int = 20) -> LookupTables:
    """One verified GF(256)/GF(2) scheme per target, in target order."""
    if not schemes:
        raise ValueError("no schemes")
    code = schemes[0].code
    f = code.field
    if f is not GF256:
        raise ValueError("tables are defined for codes over GF(256)")
    n = code.n
    by_target = {s.target: s for s in schemes}
    if sorted(by_target) != list(range(n)):
        raise ValueError("need exactly one scheme per position")
    tt = f.trace_table(GF2)
    xs = np.arange(256)
    H = np.zeros((n, n, 9), dtype=np.uint8)
    R = np.zeros((n, n, 8), dtype=np.uint8)
    D = np.zeros((n, 8), dtype=np.uint8)
    for j in range(n):
        s = by_target[j]
        if s.code != code or s.base is not GF2 or s.checkset.ell != 8:
            raise ValueError(f"scheme for {j} is not a GF(256)/GF(2) scheme of this code")
        if verify_trials and not verify_scheme(s, verify_trials):
            raise UnverifiedSchemeError(f"scheme for position {j} fails verification")
        entries = s.checkset.dual_entries()
        for i in range(n):
            if i == j:
                continue
            col = [int(x) for x in entries[:, i]]
            mu = gf2_echelon(col, 8)
            if len(mu) != s.profile[i]:
                raise AssertionError("helper basis size differs from the rank profile")
            H[i, j, 0] = len(mu)
            for t, m in enumerate(mu):
                mask = trace_mask(m)
                if not np.array_equal(SP[mask & xs], tt[f.mul_table[m, xs]]):
                    raise AssertionError(f"mask for helper {i}, target {j} is not Tr(mu x)")
                H[i, j, 1 + t] = mask
            for t, e in enumerate(col):
                sol = gf2_solve(mu, e)
                if sol is None:
                    raise AssertionError("dual entry outside the helper span")
                R[i, j, t] = sol
        D[j] = dual_basis(f, [int(x) for x in entries[:, j]], GF2)
    return LookupTables(code, H, R, D, tuple(by_target[j] for j in range(n)))


# per-codeword formulas


def sender_traces(T: LookupTables, j: int, i: int, c_i: int) -> RepairTrace:
    if i == j:
        raise ValueError("the lost node sends nothing")
    r = T.rank(i, j)
    return RepairTrace(tuple(int(SP[T.H[i, j, 1 + s] & c_i]) for s in range(r)))


def _check_traces(T: LookupTables, j: int, traces: Mapping[int, RepairTrace]) -> None:
    for i in range(T.n):
        if i == j:
            continue
        if i not in traces:
            raise ValueError(f"missing traces from helper {i}")
        if len(traces[i]) != T.rank(i, j):
            raise ValueError(f"helper {i} sent {len(traces[i])} bits, expected {T.rank(i, j)}")


def receiver_recover(T: LookupTables, j: int, traces: Mapping[int, RepairTrace]) -> int:
    """Staged receiver: column traces first, then the dual-basis sum."""
    _check_traces(T, j, traces)
    f = GF256
    out = 0
    for s in range(8):
        col = 0
        for i in range(T.n):
            if i != j:
                col ^= int(SP[T.R[i, j, s] & traces[i].value])
        out ^= f.mul(col, int(T.D[j, s]))
    return out


def receiver_recover_fused(T: LookupTables, j: int, traces: Mapping[int, RepairTrace]) -> int:
    """Both receiver steps folded into one table lookup per helper."""
    _check_traces(T, j, traces)
    out = 0
    for i in range(T.n):
        if i != j:
            out ^= int(T.fused[j, i, traces[i].value])
    return out


def repair_codeword(T: LookupTables, j: int, word: Sequence[int], fused: bool = False) -> tuple[int, int]:
    """(recovered c_j, bits received) for one codeword."""
    traces = {i: sender_traces(T, j, i, int(word[i])) for i in range(T.n) if i != j}
    bits = sum(len(t) for t in traces.values())
    rec = receiver_recover_fused if fused else receiver_recover
    return rec(T, j, traces), bits


# bulk versions over stripes


def sender_bulk(T: LookupTables, j: int, i: int, stripe: np.ndarray) -> np.ndarray:
    """Dec values for a whole stripe, straight from the sp/H formula."""
    out = np.zeros(stripe.shape, dtype=np.uint8)
    for s in range(T.rank(i, j)):
        out |= SP[T.H[i, j, 1 + s] & stripe] << np.uint8(s)
    return out


def receiver_bulk(T: LookupTables, j: int, decs: Mapping[int, np.ndarray]) -> np.ndarray:
    fused = T.fused
    out = None
    for i, d in decs.items():
        part = fused[j, i][d]
        out = part if out is None else out ^ part
    return out


def repair_bulk(T: LookupTables, j: int, stripes: np.ndarray) -> tuple[np.ndarray, int]:
    decs = {i: sender_bulk(T, j, i, stripes[i]) for i in range(T.n) if i != j}
    return receiver_bulk(T, j, decs), T.bandwidth(j) * stripes.shape[1]


# naive baseline


@dataclass
class NaiveRepair:
    """Download k symbols, apply the cached row w = G[I]^-1 G[:, j]."""

    code: GrsCode
    G: GeneratorMatrix = None
    _cache: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.G is None:
            self.G = self.code.generator().systematic()

    def helpers(self, j: int) -> tuple[int, ...]:
        return tuple(i for i in range(self.code.n) if i != j)[: self.code.k]

    def weights(self, j: int, I: Sequence[int] | None = None) -> np.ndarray:
        I = tuple(I) if I is not None else self.helpers(j)
        key = (j, I)
        if key not in self._cache:
            f = self.code.field
            if j in I or len(I) != self.code.k:
                raise CodeError("need k helpers other than the lost position")
            inv = mat_inv(f, self.G.rows[:, list(I)])  # LinAlgError when singular
            col = self.G.rows[:, j]
            w = np.zeros(self.code.k, dtype=np.int64)
            for t in range(self.code.k):
                acc = 0
                for s in range(self.code.k):
                    acc ^= f.mul(int(inv[t, s]), int(col[s]))
                w[t] = acc
            self._cache[key] = w
        return self._cache[key]

    def recover(self, j: int, symbols: Sequence[int], I: Sequence[int] | None = None) -> int:
        f = self.code.field
        out = 0
        for w, c in zip(self.weights(j, I), symbols):
            out ^= f.mul(int(w), int(c))
        return out

    def recover_bulk(self, j: int, stripes: np.ndarray, I: Sequence[int] | None = None) -> np.ndarray:
        I = tuple(I) if I is not None else self.helpers(j)
        mt = self.code.field.mul_table
        out = np.zeros(stripes.shape[1], dtype=np.uint8)
        for w, i in zip(self.weights(j, I), I):
            out ^= mt[int(w)][stripes[i]]
        return out


def naive_repair(code: GrsCode, j: int, symbols: Sequence[int], G: GeneratorMatrix | None = None,
                 I: Sequence[int] | None = None) -> int:
    return NaiveRepair(code, G).recover(j, symbols, I)


# benchmark


@dataclass
class BenchRow:
    method: str
    role: str
    seconds: float
    bytes_transferred: float
    codewords: int


@dataclass
class BenchReport:
    rows: list[BenchRow]
    bits: dict[str, int]  # method -> total bits moved
    exact: bool = True

    def row(self, method: str, role: str) -> BenchRow:
        return next(r for r in self.rows if r.method == method and r.role == role)

    def ratio(self) -> float:
        naive = self.row("naive", "total").seconds
        return self.row("trace", "total").seconds / naive if naive else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "role", "seconds", "bytes_transferred", "codewords"])
        for r in self.rows:
            b = r.bytes_transferred
            w.writerow([r.method, r.role, f"{r.seconds:.6f}", int(b) if float(b).is_integer() else f"{b:.3f}",
                        r.codewords])
        return buf.getvalue()


def stripes_for(code: GrsCode, count: int, rng: np.random.Generator) -> np.ndarray:
    return code.random_codewords(count, rng).T.astype(np.uint8).copy()


def bench(code: GrsCode, tables: LookupTables, count: int, erasure: int | str = "random", seed: int = 0,
          naive: NaiveRepair | None = None, chunk: int = 1 << 18) -> BenchReport:
    """Repair ``count`` single erasures both ways; timings are per method and role."""
    rng = np.random.default_rng(seed)
    n = code.n
    naive = naive or NaiveRepair(code)
    if count == 0:
        rows = [BenchRow(m, role, 0.0, 0, 0) for m in ("trace", "naive") for role in ("sender", "receiver", "total")]
        return BenchReport(rows, {"trace": 0, "naive": 0})
    if erasure == "random":
        lost = rng.integers(0, n, size=count)
    else:
        lost = np.full(count, int(erasure))
    send_t = np.zeros(n)
    recv_t = 0.0
    naive_send_t = np.zeros(n)
    naive_recv = 0.0
    bits_trace = bits_naive = 0
    exact = True
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        stripes = stripes_for(code, hi - lo, rng)
        for j in np.unique(lost[lo:hi]):
            j = int(j)
            sel = np.flatnonzero(lost[lo:hi] == j)
            part = stripes[:, sel]
            decs = {}
            for i in range(n):
                if i == j:
                    continue
                t0 = time.perf_counter()
                decs[i] = sender_bulk(tables, j, i, part[i])
                send_t[i] += time.perf_counter() - t0
            t0 = time.perf_counter()
            got = receiver_bulk(tables, j, decs)
            recv_t += time.perf_counter() - t0
            bits_trace += tables.bandwidth(j) * len(sel)

            I = naive.helpers(j)
            sent = []
            for i in I:
                t0 = time.perf_counter()
                sent.append(np.ascontiguousarray(part[i]))
                naive_send_t[i] += time.perf_counter() - t0
            t0 = time.perf_counter()
            got_naive = _naive_apply(naive, j, I, sent)
            naive_recv += time.perf_counter() - t0
            bits_naive += 8 * code.k * len(sel)
            exact &= bool(np.array_equal(got, part[j]) and np.array_equal(got_naive, part[j]))
    trace_send = float(send_t.max())
    naive_send = float(naive_send_t.max())
    rows = [
        BenchRow("trace", "sender", trace_send, bits_trace / 8, count),
        BenchRow("trace", "receiver", recv_t, bits_trace / 8, count),
        BenchRow("trace", "total", trace_send + recv_t, bits_trace / 8, count),
        BenchRow("naive", "sender", naive_send, bits_naive / 8, count),
        BenchRow("naive", "receiver", naive_recv, bits_naive / 8, count),
        BenchRow("naive", "total", naive_send + naive_recv, bits_naive / 8, count),
    ]
    return BenchReport(rows, {"trace": bits_trace, "naive": bits_naive}, exact)


def _naive_apply(naive: NaiveRepair, j: int, I: Sequence[int], sent: Sequence[np.ndarray]) -> np.ndarray:
    mt = naive.code.field.mul_table
    out = np.zeros(len(sent[0]), dtype=np.uint8)
    for w, s in zip(naive.weights(j, I), sent):
        out ^= mt[int(w)][s]
    return out
