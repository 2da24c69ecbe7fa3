"""
Arithmetic over the binary tower GF(2) < GF(4) < GF(16) < GF(256).

Elements are plain ints: bit i of the value is the coefficient of z^i in the
polynomial basis, so ``6 == z^2 + z``.  Each field carries log/antilog tables
and a full multiplication table (at most 64 KiB for GF(256)) so that batched
work can be done with numpy fancy indexing.

Subfields are handled through explicit embeddings.  A subfield K of F is
represented inside F by the image of K's own polynomial basis, and every
rank "over K" is computed on GF(2)-expansions: for a set U inside F,
span_K(U) = span_GF(2){u * b : u in U, b a GF(2)-basis of K}, hence
rank_K(U) = rank_GF(2)(expanded U) / [K : GF(2)].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

# Conway polynomials, as bitmasks (bit i = coefficient of z^i).
CONWAY = {1: 0b11, 2: 0b111, 4: 0x13, 8: 0x11D}
FIELD_NAMES = {"gf2": 1, "gf4": 2, "gf16": 4, "gf256": 8}


class FieldMismatchError(ValueError):
    pass


class SubfieldError(ValueError):
    pass


class GF:
    """The field GF(2^m) for m in {1, 2, 4, 8}.

    Use :func:`field` to obtain the shared instances; the tables are built
    once and never mutated.
    """

    def __init__(self, m: int, modulus: int | None = None):
        if m not in CONWAY:
            raise ValueError(f"unsupported extension degree {m}")
        self.m = m
        self.modulus = CONWAY[m] if modulus is None else modulus
        self.order = 1 << m
        self.name = f"gf{self.order}"
        q1 = self.order - 1
        self.generator = 2 if self.order > 2 else 1

        exp = np.zeros(2 * q1, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        x = 1
        for i in range(q1):
            exp[i] = x
            log[x] = i
            x = _polymulmod(x, self.generator, self.modulus, m)
        exp[q1:] = exp[:q1]
        if x != 1 or np.any(log[1:] < 0):
            raise ValueError(f"modulus {self.modulus:#x} is not primitive")
        self.exp_table = exp
        self.log_table = log

        a = np.arange(self.order)
        la = log[a]
        s = la[:, None] + la[None, :]
        mt = exp[np.where(s < 0, 0, s)]
        mt[0, :] = 0
        mt[:, 0] = 0
        dtype = np.uint8 if self.order <= 256 else np.uint16
        self.mul_table = mt.astype(dtype)
        inv = np.zeros(self.order, dtype=np.int64)
        inv[1:] = exp[(q1 - log[1:]) % q1]
        self.inv_table = inv
        for t in (exp, log, self.mul_table, inv):
            t.setflags(write=False)

    def __repr__(self) -> str:
        return f"GF({self.order})"

    def __reduce__(self):
        return (field, (self.name,))

    # scalar arithmetic on ints

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of {self!r}")
        return a

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[self.log_table[a] + self.log_table[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        return int(self.exp_table[(self.log_table[a] * e) % (self.order - 1)])

    def exp_to_int(self, e: int) -> int:
        """z^e as an integer."""
        return int(self.exp_table[e % (self.order - 1)])

    def int_to_exp(self, a: int) -> int:
        """The exponent e in [0, order-2] with z^e == a."""
        if a == 0:
            raise ValueError("log of zero")
        return int(self.log_table[self.check(a)])

    def prod(self, values: Iterable[int]) -> int:
        out = 1
        for v in values:
            out = self.mul(out, v)
        return out

    def elements(self) -> range:
        return range(self.order)

    # traces and subfields

    def trace(self, a: int, base: "GF | None" = None) -> int:
        """Tr_{F/K}(a), returned in K's own representation."""
        base = GF2 if base is None else base
        return int(self.trace_table(base)[a])

    def trace_table(self, base: "GF | None" = None) -> np.ndarray:
        base = GF2 if base is None else base
        return _trace_table(self.m, base.m)

    def subfield_basis(self, base: "GF") -> list[int]:
        """Image in this field of K's polynomial basis 1, z_K, ..., z_K^(d-1)."""
        emb = embedding(base, self)
        return [int(emb.image[1 << t]) for t in range(base.m)]

    def degree_over(self, base: "GF") -> int:
        if self.m % base.m:
            raise SubfieldError(f"{base!r} is not a subfield of {self!r}")
        return self.m // base.m


def _polymulmod(a: int, b: int, modulus: int, m: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= modulus
    return out


@lru_cache(maxsize=None)
def _field(m: int) -> GF:
    return GF(m)


def field(name: "str | int | GF") -> GF:
    """Look up a tower field by name ("gf16"), order (16) or degree."""
    if isinstance(name, GF):
        return name
    if isinstance(name, str):
        try:
            return _field(FIELD_NAMES[name.lower()])
        except KeyError:
            raise ValueError(f"unknown field {name!r}") from None
    if name in (2, 4, 16, 256):
        return _field(int(name).bit_length() - 1)
    return _field(int(name))


GF2 = field("gf2")
GF4 = field("gf4")
GF16 = field("gf16")
GF256 = field("gf256")


@dataclass(frozen=True)
class Element:
    """A field element tagged with its field; arithmetic refuses mixing fields."""

    value: int
    field: GF

    def __post_init__(self):
        self.field.check(self.value)

    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element) or other.field is not self.field:
            raise FieldMismatchError(f"cannot combine {self!r} with {other!r}")

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.value ^ other.value, self.field)

    __sub__ = __add__

    def __mul__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.field.mul(self.value, other.value), self.field)

    def __truediv__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.field.div(self.value, other.value), self.field)

    def __pow__(self, e: int) -> "Element":
        return Element(self.field.pow(self.value, e), self.field)

    def __int__(self) -> int:
        return self.value

    @property
    def exponent(self) -> int:
        return self.field.int_to_exp(self.value)

    @property
    def bits(self) -> tuple[int, ...]:
        """Coefficients of z^0 .. z^(m-1)."""
        return tuple((self.value >> i) & 1 for i in range(self.field.m))

    def trace(self, base: GF | None = None) -> "Element":
        base = GF2 if base is None else base
        return Element(self.field.trace(self.value, base), base)

    def __repr__(self) -> str:
        return f"{self.field.name}({self.value})"


def add(a: Element, b: Element) -> Element:
    return a + b


def mul(a: Element, b: Element) -> Element:
    return a * b


@dataclass(frozen=True)
class SubfieldEmbedding:
    source: GF
    target: GF
    image: np.ndarray  # source value -> target value
    preimage: np.ndarray  # target value -> source value, -1 outside the image

    def __call__(self, a: int) -> int:
        return int(self.image[a])

    def inverse(self, b: int) -> int:
        v = int(self.preimage[b])
        if v < 0:
            raise SubfieldError(f"{b} does not lie in the image of {self.source!r}")
        return v


@lru_cache(maxsize=None)
def _embedding(ms: int, mt: int) -> SubfieldEmbedding:
    src, tgt = _field(ms), _field(mt)
    if mt % ms:
        raise SubfieldError(f"{src!r} is not a subfield of {tgt!r}")
    if ms == 1:
        gen = 1
    else:
        # Conway compatibility: z_T^((|T|-1)/(|S|-1)) must satisfy S's modulus.
        step = (tgt.order - 1) // (src.order - 1)
        gen = None
        for t in range(1, src.order - 1):
            if gcd(t, src.order - 1) != 1:
                continue
            cand = tgt.exp_to_int(step * t)
            if _eval_mask_poly(tgt, src.modulus, cand) == 0:
                gen = cand
                break
        assert gen == tgt.exp_to_int(step), "tower is not Conway-compatible"
    image = np.zeros(src.order, dtype=np.int64)
    for e in range(src.order - 1):
        image[src.exp_to_int(e)] = tgt.pow(gen, e)
    pre = np.full(tgt.order, -1, dtype=np.int64)
    pre[image] = np.arange(src.order)
    image.setflags(write=False)
    pre.setflags(write=False)
    return SubfieldEmbedding(src, tgt, image, pre)


def embedding(source: GF, target: GF) -> SubfieldEmbedding:
    return _embedding(source.m, target.m)


def _eval_mask_poly(f: GF, mask: int, x: int) -> int:
    acc = 0
    for i in range(mask.bit_length() - 1, -1, -1):
        acc = f.mul(acc, x) ^ ((mask >> i) & 1)
    return acc


@lru_cache(maxsize=None)
def _trace_table(m: int, mb: int) -> np.ndarray:
    f, base = _field(m), _field(mb)
    deg = f.degree_over(base)
    q = base.order
    emb = embedding(base, f)
    out = np.zeros(f.order, dtype=np.int64)
    for a in range(f.order):
        s, t = a, a
        for _ in range(deg - 1):
            t = f.pow(t, q)
            s ^= t
        out[a] = emb.inverse(s)
    out.setflags(write=False)
    return out


def trace(a: Element, base: GF | None = None) -> Element:
    return a.trace(base)


# GF(2) linear algebra on packed bit vectors


def gf2_rank(vectors: np.ndarray, nbits: int) -> np.ndarray:
    """Ranks of batches of packed GF(2) vectors.

    ``vectors`` has shape (..., L); each entry is an int whose low ``nbits``
    bits form a vector.  Returns an int array of shape (...).
    """
    v = np.asarray(vectors, dtype=np.int64)
    batch = v.shape[:-1]
    basis = np.zeros(batch + (nbits,), dtype=np.int64)
    for idx in range(v.shape[-1]):
        x = v[..., idx].copy()
        for b in range(nbits - 1, -1, -1):
            has = ((x >> b) & 1).astype(bool)
            cur = basis[..., b]
            fresh = has & (cur == 0)
            basis[..., b] = np.where(fresh, x, cur)
            x = np.where(fresh, 0, np.where(has, x ^ cur, x))
    return np.count_nonzero(basis, axis=-1)


def gf2_echelon(vectors: Sequence[int], nbits: int) -> list[int]:
    """Reduced row echelon basis (leading bit descending) of span(vectors)."""
    basis: dict[int, int] = {}
    for v in vectors:
        for b in sorted(basis, reverse=True):
            if (v >> b) & 1:
                v ^= basis[b]
        if v:
            lead = v.bit_length() - 1
            for b in list(basis):
                if (basis[b] >> lead) & 1:
                    basis[b] ^= v
            basis[lead] = v
    return [basis[b] for b in sorted(basis, reverse=True)]


def gf2_solve(basis: Sequence[int], v: int) -> int | None:
    """Bitmask s with XOR of basis[t] over set bits t of s equal to v, if any.

    ``basis`` must be linearly independent.
    """
    # eliminate with combination tracking
    rows: list[tuple[int, int]] = []
    for t, b in enumerate(basis):
        combo = 1 << t
        for lead_vec, lead_combo in rows:
            lead = lead_vec.bit_length() - 1
            if (b >> lead) & 1:
                b ^= lead_vec
                combo ^= lead_combo
        if b == 0:
            raise ValueError("basis vectors are dependent")
        rows.append((b, combo))
        rows.sort(key=lambda r: -r[0].bit_length())
    s = 0
    for lead_vec, lead_combo in rows:
        lead = lead_vec.bit_length() - 1
        if (v >> lead) & 1:
            v ^= lead_vec
            s ^= lead_combo
    return s if v == 0 else None


# ranks over subfields


def _expansion(f: GF, base: GF) -> np.ndarray:
    return np.asarray(f.subfield_basis(base), dtype=np.int64)


def expand_over_gf2(f: GF, values: np.ndarray, base: GF) -> np.ndarray:
    """Replace each value u by the d products u*b_t over K's GF(2)-basis."""
    values = np.asarray(values, dtype=np.int64)
    bb = _expansion(f, base)
    prods = f.mul_table[values[..., :, None], bb].astype(np.int64)
    return prods.reshape(values.shape[:-1] + (-1,))


@lru_cache(maxsize=None)
def nibble_rank_table() -> np.ndarray:
    """GF(2)-rank of four packed 4-bit vectors, indexed by a|b<<4|c<<8|d<<12."""
    idx = np.arange(1 << 16, dtype=np.int64)
    vecs = np.stack([(idx >> (4 * t)) & 0xF for t in range(4)], axis=-1)
    out = gf2_rank(vecs, 4).astype(np.int8)
    out.setflags(write=False)
    return out


def rank_over_batch(f: GF, values: np.ndarray, base: GF) -> np.ndarray:
    """rank_K of each row of ``values`` (shape (..., L)), as an int array."""
    f.degree_over(base)
    d = base.m
    values = np.asarray(values, dtype=np.int64)
    if f.m == 4 and base.m == 1 and values.shape[-1] == 4:
        packed = values[..., 0] | (values[..., 1] << 4) | (values[..., 2] << 8) | (values[..., 3] << 12)
        return nibble_rank_table()[packed].astype(np.int64)
    if base.m == f.m:
        return np.minimum(np.count_nonzero(values, axis=-1), 1)
    vecs = values if base.m == 1 else expand_over_gf2(f, values, base)
    return gf2_rank(vecs, f.m) // d


def rank_over(f: GF, U: Iterable[int], base: GF) -> int:
    """Dimension over ``base`` of the span of ``U`` inside ``f``."""
    U = [f.check(int(u)) for u in U]
    f.degree_over(base)
    if not U:
        return 0
    return int(rank_over_batch(f, np.asarray([U]), base)[0])


def span_over(f: GF, U: Iterable[int], base: GF) -> frozenset[int]:
    """All elements of span_K(U); fine for the small fields used here."""
    gens = [int(x) for x in expand_over_gf2(f, np.asarray([list(U)]), base)[0]] if list(U) else []
    span = {0}
    for g in gf2_echelon(gens, f.m):
        span |= {s ^ g for s in span}
    return frozenset(span)


# matrices over a field (small, exact)


def mat_mul(f: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    prods = f.mul_table[a[:, :, None], b[None, :, :]]
    return np.bitwise_xor.reduce(prods, axis=1).astype(np.int64)


def row_reduce(f: GF, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    r = np.array(m, dtype=np.int64, copy=True)
    if r.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = r.shape
    pivots: list[int] = []
    pr = 0
    for c in range(cols):
        if pr == rows:
            break
        nz = np.nonzero(r[pr:, c])[0]
        if nz.size == 0:
            continue
        p = pr + int(nz[0])
        if p != pr:
            r[[pr, p]] = r[[p, pr]]
        r[pr] = f.mul_table[f.inv(int(r[pr, c])), r[pr]]
        for i in range(rows):
            if i != pr and r[i, c]:
                r[i] ^= f.mul_table[int(r[i, c]), r[pr]]
        pivots.append(c)
        pr += 1
    return r, pivots


def mat_rank(f: GF, m: np.ndarray) -> int:
    if np.asarray(m).size == 0:
        return 0
    return len(row_reduce(f, m)[1])


def mat_inv(f: GF, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("matrix is not square")
    aug = np.concatenate([m, np.eye(n, dtype=np.int64)], axis=1)
    red, piv = row_reduce(f, aug)
    if piv[:n] != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular")
    return red[:, n:]


def dual_basis(f: GF, B: Sequence[int], base: GF | None = None) -> list[int]:
    """The trace-dual basis D of B over ``base``: Tr(B[i]*D[j]) = [i == j]."""
    base = GF2 if base is None else base
    ell = f.degree_over(base)
    B = [int(b) for b in B]
    if len(B) != ell or rank_over(f, B, base) != ell:
        raise SubfieldError("input is not a basis over the base field")
    emb = embedding(base, f)
    tt = f.trace_table(base)
    gram = np.array([[emb(int(tt[f.mul(bi, bj)])) for bj in B] for bi in B], dtype=np.int64)
    ginv = mat_inv(f, gram)
    out = []
    for j in range(ell):
        acc = 0
        for i in range(ell):
            acc ^= f.mul(int(ginv[j, i]), B[i])
        out.append(acc)
    return out


def subspace_poly(f: GF, W: Iterable[int], base: GF | None = None):
    """L_W(x) = prod_{w in W} (x - w) for a ``base``-subspace W of ``f``."""
    from .poly import Polynomial

    base = GF2 if base is None else base
    W = sorted({int(w) for w in W})
    ws = set(W)
    scalars = [int(s) for s in embedding(base, f).image]
    if 0 not in ws or any((a ^ b) not in ws for a in W for b in W) or any(
        f.mul(c, w) not in ws for c in scalars for w in W
    ):
        raise SubfieldError("W is not a subspace over the base field")
    return Polynomial.from_roots(f, W)
