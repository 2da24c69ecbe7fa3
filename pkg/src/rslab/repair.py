"""
Linear trace-repair schemes for GRS codes.

A scheme for position ``target`` of a GRS code over F, with base field K,
is a set of ell = [F:K] check polynomials g_i of degree < r.  Each g_i gives
the dual codeword (gamma_j * g_i(a_j))_j, where gamma are the dual code's
multipliers, so for every codeword c

    Tr(gamma_t g_i(a_t) c_t) = sum_{j != t} Tr(gamma_j g_i(a_j) c_j).

Helper j only has to ship r_j = rank_K{g_i(a_j)} traces.  Multipliers never
change a rank, so profiles are computed from the bare polynomial values.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .galois import (
    GF,
    GF2,
    GF256,
    SubfieldError,
    dual_basis,
    embedding,
    expand_over_gf2,
    field as get_field,
    gf2_solve,
    rank_over,
    rank_over_batch,
)
from .grs import GrsCode, format_code, parse_code
from .poly import Polynomial


class UnverifiedSchemeError(ValueError):
    """The check set fails the Full-Rank Condition at its target."""


class NotACodewordError(ValueError):
    pass


@dataclass(frozen=True)
class CheckSet:
    code: GrsCode
    target: int
    base: GF
    polys: tuple[Polynomial, ...]

    def __post_init__(self):
        f = self.code.field
        object.__setattr__(self, "polys", tuple(self.polys))
        if not 0 <= self.target < self.code.n:
            raise ValueError(f"target {self.target} out of range")
        if len(self.polys) != f.degree_over(self.base):
            raise ValueError(f"need {f.degree_over(self.base)} polynomials over {self.base!r}")
        for p in self.polys:
            if p.field is not f:
                raise ValueError("polynomial field differs from the code field")
            if p.degree > self.code.r - 1:
                raise ValueError(f"check polynomial degree {p.degree} exceeds r-1 = {self.code.r - 1}")

    @property
    def ell(self) -> int:
        return len(self.polys)

    def evaluations(self) -> np.ndarray:
        """(ell, n) array of g_i(a_j)."""
        return np.array([p.evaluate(self.code.A) for p in self.polys], dtype=np.int64)

    def dual_entries(self) -> np.ndarray:
        """(ell, n) array of gamma_j * g_i(a_j)."""
        gamma = np.asarray(self.code.dual().lam, dtype=np.int64)
        return self.code.field.mul_table[self.evaluations(), gamma[None, :]].astype(np.int64)

    def rank_profile(self) -> tuple[int, ...]:
        ranks = rank_over_batch(self.code.field, self.evaluations().T, self.base)
        return tuple(int(x) for x in ranks)

    def full_rank(self) -> bool:
        return full_rank_condition(self)


def full_rank_condition(cs: CheckSet) -> bool:
    col = [p(cs.code.A[cs.target]) for p in cs.polys]
    return rank_over(cs.code.field, col, cs.base) == cs.ell


def bandwidth(cs: CheckSet) -> tuple[tuple[int, ...], int]:
    """Rank profile and repair bandwidth in bits."""
    prof = cs.rank_profile()
    if prof[cs.target] != cs.ell:
        raise UnverifiedSchemeError(f"Full-Rank Condition fails at position {cs.target}")
    return prof, (sum(prof) - prof[cs.target]) * cs.base.m


@dataclass(frozen=True)
class RepairScheme:
    checkset: CheckSet
    profile: tuple[int, ...]
    bandwidth: int  # bits

    @classmethod
    def from_checkset(cls, cs: CheckSet) -> "RepairScheme":
        prof, bits = bandwidth(cs)
        return cls(cs, prof, bits)

    @property
    def code(self) -> GrsCode:
        return self.checkset.code

    @property
    def target(self) -> int:
        return self.checkset.target

    @property
    def base(self) -> GF:
        return self.checkset.base

    @property
    def polys(self) -> tuple[Polynomial, ...]:
        return self.checkset.polys

    @property
    def bandwidth_symbols(self) -> int:
        """Bandwidth counted in base-field symbols."""
        return self.bandwidth // self.base.m

    def key(self) -> tuple:
        return tuple(p.coeffs for p in self.polys)

    @cached_property
    def plan(self) -> "RepairPlan":
        return RepairPlan.build(self)


def make_scheme(code: GrsCode, target: int, polys: Iterable[Polynomial], base: GF = GF2) -> RepairScheme:
    return RepairScheme.from_checkset(CheckSet(code, target, base, tuple(polys)))


def naive_scheme(code: GrsCode, target: int, base: GF = GF2) -> RepairScheme:
    """beta_i * g(x), g vanishing on the r-1 first non-target points: k*m bits."""
    f = code.field
    others = [a for j, a in enumerate(code.A) if j != target][: code.r - 1]
    g = Polynomial.from_roots(f, others)
    betas = _default_basis(f, base)
    return make_scheme(code, target, [g * b for b in betas], base)


def _default_basis(f: GF, base: GF) -> list[int]:
    # powers of z generate f over every subfield
    return [f.exp_to_int(t) for t in range(f.degree_over(base))]


@dataclass(frozen=True)
class HelperPlan:
    position: int
    basis: tuple[int, ...]  # mu_t, a K-basis of span{gamma_j g_i(a_j)}
    coeffs: np.ndarray  # (ell, r_j) K-coefficients of each dual entry on mu


@dataclass(frozen=True)
class RepairPlan:
    """Precomputed helper bases, recombination coefficients and dual basis."""

    helpers: tuple[HelperPlan, ...]
    dual: tuple[int, ...]
    parity: Polynomial | None
    gamma: tuple[int, ...]

    @classmethod
    def build(cls, scheme: RepairScheme) -> "RepairPlan":
        f, base, t = scheme.code.field, scheme.base, scheme.target
        entries = scheme.checkset.dual_entries()
        helpers = []
        for j in range(scheme.code.n):
            if j == t:
                continue
            col = [int(x) for x in entries[:, j]]
            mu = independent_subset(f, col, base)
            helpers.append(HelperPlan(j, tuple(mu), coordinates(f, mu, col, base)))
        dual = dual_basis(f, [int(x) for x in entries[:, t]], base)
        parity = None
        if scheme.code.r >= 2:
            parity = Polynomial(f, (scheme.code.A[t], 1))
        return cls(tuple(helpers), tuple(dual), parity, scheme.code.dual().lam)


def independent_subset(f: GF, values: Sequence[int], base: GF) -> list[int]:
    """Greedy K-independent subset, in input order."""
    chosen: list[int] = []
    rank = 0
    for v in values:
        if v and rank_over(f, chosen + [v], base) > rank:
            chosen.append(v)
            rank += 1
    return chosen


def coordinates(f: GF, basis: Sequence[int], values: Sequence[int], base: GF) -> np.ndarray:
    """K-coordinates of each value on a K-independent ``basis``."""
    d = base.m
    out = np.zeros((len(values), len(basis)), dtype=np.int64)
    if not basis:
        return out
    gens = [int(x) for x in expand_over_gf2(f, np.asarray([list(basis)]), base)[0]]
    for i, v in enumerate(values):
        sol = gf2_solve(gens, int(v))
        if sol is None:
            raise SubfieldError("value outside the span of the helper basis")
        for t in range(len(basis)):
            out[i, t] = (sol >> (t * d)) & ((1 << d) - 1)
    return out


@dataclass(frozen=True)
class RepairTranscript:
    value: int
    bits: int
    sent: dict[int, tuple[int, ...]]  # helper position -> base-field traces


def trace_repair(scheme: RepairScheme, word: Sequence[int]) -> RepairTranscript:
    """Run the scheme on a received word; ``word[target]`` is ignored."""
    code, f, base = scheme.code, scheme.code.field, scheme.base
    plan = scheme.plan
    word = [int(x) if x is not None else 0 for x in word]
    if len(word) != code.n:
        raise ValueError("word length differs from code length")
    if plan.parity is not None:
        gamma = plan.gamma
        chk = 0
        for j, a in enumerate(code.A):
            if j != scheme.target:
                chk ^= f.mul(f.mul(gamma[j], plan.parity(a)), word[j])
        if chk:
            raise NotACodewordError("helper symbols fail a parity check")
    tt = f.trace_table(base)
    acc = [0] * scheme.checkset.ell
    sent = {}
    bits = 0
    for h in plan.helpers:
        traces = tuple(int(tt[f.mul(mu, word[h.position])]) for mu in h.basis)
        sent[h.position] = traces
        bits += len(traces) * base.m
        for i in range(len(acc)):
            for t, tr in enumerate(traces):
                acc[i] ^= base.mul(int(h.coeffs[i, t]), tr)
    emb = embedding(base, f)
    value = 0
    for i, d in enumerate(plan.dual):
        value ^= f.mul(emb(acc[i]), d)
    return RepairTranscript(value, bits, sent)


def repair_symbol(scheme: RepairScheme, word: Sequence[int]) -> int:
    return trace_repair(scheme, word).value


def verify_scheme(scheme: RepairScheme, trials: int = 100, seed: int = 0) -> bool:
    """Full-rank check plus encode/erase/repair round trips."""
    if not full_rank_condition(scheme.checkset):
        return False
    if bandwidth(scheme.checkset) != (scheme.profile, scheme.bandwidth):
        return False
    rng = np.random.default_rng(seed)
    words = scheme.code.random_codewords(trials, rng)
    for w in words:
        w = [int(x) for x in w]
        tr = trace_repair(scheme, w)
        if tr.value != w[scheme.target] or tr.bits != scheme.bandwidth:
            return False
    return True


# transformations


def normalize_degree(cs: CheckSet) -> CheckSet:
    """Rewrite a check set so every polynomial has degree exactly r - 1."""
    f, code = cs.code.field, cs.code
    top = code.r - 1
    polys = list(cs.polys)
    maxdeg = max(p.degree for p in polys)
    if maxdeg < 0:
        raise ValueError("all check polynomials are zero")
    if maxdeg < top:
        abar = next(a for j, a in enumerate(code.A) if j != cs.target)
        factor = Polynomial(f, (abar, 1)) ** (top - maxdeg)
        polys = [p * factor for p in polys]
    g1 = next(p for p in polys if p.degree == top)
    polys = [p if p.degree == top else p + g1 for p in polys]
    return CheckSet(code, cs.target, cs.base, tuple(polys))


def lift(
    scheme: RepairScheme,
    target_field: GF = GF256,
    basis: Sequence[int] | None = None,
    code: GrsCode | None = None,
) -> RepairScheme:
    """Move a scheme for RS(A, k) over a subfield to the same A over ``target_field``."""
    small = scheme.code.field
    emb = embedding(small, target_field)
    if basis is None:
        basis = _default_basis(target_field, small)
    basis = [int(b) for b in basis]
    factor = target_field.degree_over(small)
    if len(basis) != factor or rank_over(target_field, basis, small) != factor:
        raise SubfieldError("basis is not a basis of the extension over the small field")
    if code is None:
        src = scheme.code
        code = GrsCode(
            target_field,
            tuple(emb(a) for a in src.A),
            src.k,
            tuple(emb(x) for x in src.lam),
            name=f"{src.name}-lifted",
        )
    polys = [p.embed(emb) * b for b in basis for p in scheme.polys]
    out = make_scheme(code, scheme.target, polys, scheme.base)
    assert out.bandwidth == factor * scheme.bandwidth
    return out


def extend(scheme: RepairScheme, new_base: GF = GF2, basis: Sequence[int] | None = None) -> RepairScheme:
    """Trade a coarse base field K for a subfield of it; bits are unchanged."""
    f, K = scheme.code.field, scheme.base
    m = K.degree_over(new_base)
    emb = embedding(K, f)
    if basis is None:
        basis = [emb(K.exp_to_int(t)) for t in range(m)]
    basis = [int(b) for b in basis]
    if len(basis) != m or any(embedding(K, f).preimage[b] < 0 for b in basis):
        raise SubfieldError("basis must lie in the old base field")
    if rank_over(f, basis, new_base) != m:
        raise SubfieldError("basis is not a basis over the new base field")
    polys = [p * g for p in scheme.polys for g in basis]
    out = make_scheme(scheme.code, scheme.target, polys, new_base)
    assert out.bandwidth == scheme.bandwidth
    return out


def transport(scheme: RepairScheme, beta: int, gamma: int) -> RepairScheme:
    """Scheme for RS(beta*A + gamma, k) via h_i(x) = g_i((x - gamma) / beta)."""
    f = scheme.code.field
    if beta == 0:
        raise ValueError("beta must be nonzero")
    binv = f.inv(beta)
    A = tuple(f.mul(beta, a) ^ gamma for a in scheme.code.A)
    code = scheme.code.with_points(A)
    polys = [p.compose_affine(binv, f.mul(binv, gamma)) for p in scheme.polys]
    return make_scheme(code, scheme.target, polys, scheme.base)


# scheme files

SCHEME_HEADER = "rs-scheme v1"


def format_schemes(code: GrsCode, schemes: Iterable[RepairScheme]) -> str:
    lines = [SCHEME_HEADER, format_code(code)]
    for s in schemes:
        if s.code != code:
            raise ValueError("scheme belongs to a different code")
        lines.append(f"target j={s.target} base={s.base.name} bandwidth={s.bandwidth}")
        for p in s.polys:
            lines.append("poly " + (",".join(str(c) for c in p.coeffs) or "0"))
    return "\n".join(lines) + "\n"


def parse_schemes(text: str) -> tuple[GrsCode, list[RepairScheme]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != SCHEME_HEADER:
        raise ValueError("missing rs-scheme header")
    code = parse_code(lines[1])
    schemes: list[RepairScheme] = []
    block: tuple[int, GF, int] | None = None
    polys: list[Polynomial] = []

    def flush():
        if block is not None:
            s = make_scheme(code, block[0], polys, block[1])
            if s.bandwidth != block[2]:
                raise UnverifiedSchemeError(
                    f"target {block[0]}: recorded bandwidth {block[2]} != computed {s.bandwidth}"
                )
            schemes.append(s)

    for ln in lines[2:]:
        head, _, rest = ln.partition(" ")
        if head == "target":
            flush()
            kv = dict(p.split("=", 1) for p in rest.split())
            block = (int(kv["j"]), get_field(kv["base"]), int(kv["bandwidth"]))
            polys = []
        elif head == "poly":
            polys.append(Polynomial(code.field, [int(x) for x in rest.split(",")]))
        else:
            raise ValueError(f"unexpected line {ln!r}")
    flush()
    return code, schemes


def write_atomic(path: str | os.PathLike, data: str | bytes) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data.encode() if isinstance(data, str) else data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_scheme_file(path, code: GrsCode, schemes: Iterable[RepairScheme]) -> None:
    write_atomic(path, format_schemes(code, schemes))


def read_scheme_file(path) -> tuple[GrsCode, list[RepairScheme]]:
    with open(path) as fh:
        return parse_schemes(fh.read())
