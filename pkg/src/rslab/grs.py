"""
Industry Reed-Solomon variants over GF(256), normalized to (A, lambda) form.

Every valid construction here ends up as a :class:`GrsCode`: evaluation
points ``A``, dimension ``k`` and column multipliers ``lam``; the codeword
of a message polynomial f (deg f < k) is (lam_j * f(A_j))_j.  The Vandermonde
systematic matrix used by some libraries is not a GRS code in general and
is only available as a raw :class:`GeneratorMatrix`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .galois import GF, GF256, field as get_field, mat_inv, mat_mul, mat_rank, row_reduce
from .poly import Polynomial


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorMatrix:
    field: GF
    rows: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        m = np.array(self.rows, dtype=np.int64)
        m.setflags(write=False)
        object.__setattr__(self, "rows", m)

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def rank(self) -> int:
        return mat_rank(self.field, self.rows)

    def encode(self, u: Sequence[int]) -> list[int]:
        if len(u) != self.k:
            raise CodeError(f"message has {len(u)} symbols, expected {self.k}")
        return [int(x) for x in mat_mul(self.field, np.asarray([u]), self.rows)[0]]

    def encode_many(self, messages: np.ndarray) -> np.ndarray:
        """Encode a (T, k) array of messages into (T, n) codewords."""
        messages = np.asarray(messages, dtype=np.int64)
        mt = self.field.mul_table
        out = np.zeros((messages.shape[0], self.n), dtype=np.int64)
        for i in range(self.k):
            out ^= mt[messages[:, i][:, None], self.rows[i][None, :]]
        return out

    def is_systematic(self) -> bool:
        return bool(np.array_equal(self.rows[:, : self.k], np.eye(self.k, dtype=np.int64)))

    def systematic(self) -> "GeneratorMatrix":
        red, piv = row_reduce(self.field, self.rows)
        if piv != list(range(self.k)):
            raise CodeError("leading k columns are not an information set")
        return GeneratorMatrix(self.field, red)

    def same_code(self, other: "GeneratorMatrix") -> bool:
        """Row-space equality via rank(stack) == rank(G1) == rank(G2)."""
        if other.field is not self.field or other.n != self.n:
            return False
        r1, r2 = self.rank(), other.rank()
        return r1 == r2 == mat_rank(self.field, np.vstack([self.rows, other.rows]))

    def is_mds(self) -> bool:
        """Every k columns invertible."""
        return find_singular_columns(self) is None


def find_singular_columns(g: GeneratorMatrix) -> tuple[int, ...] | None:
    for cols in itertools.combinations(range(g.n), g.k):
        if mat_rank(g.field, g.rows[:, cols]) < g.k:
            return cols
    return None


def find_singular_minor(v: np.ndarray, f: GF) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """A (rows, cols) pair indexing a singular square submatrix of ``v``."""
    k, r = v.shape
    for t in range(1, min(k, r) + 1):
        for rows in itertools.combinations(range(k), t):
            for cols in itertools.combinations(range(r), t):
                if mat_rank(f, v[np.ix_(rows, cols)]) < t:
                    return rows, cols
    return None


def is_mds(g: GeneratorMatrix) -> bool:
    if g.is_systematic():
        return find_singular_minor(g.rows[:, g.k :], g.field) is None
    return g.is_mds()


@dataclass(frozen=True)
class GrsCode:
    """GRS(A, k, lam); lam defaults to all ones (a plain RS(A, k))."""

    field: GF
    A: tuple[int, ...]
    k: int
    lam: tuple[int, ...] = ()
    name: str = "grs"

    def __post_init__(self):
        f = self.field
        A = tuple(f.check(int(a)) for a in self.A)
        lam = tuple(f.check(int(x)) for x in self.lam) if self.lam else (1,) * len(A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "lam", lam)
        n = len(A)
        if len(set(A)) != n:
            raise CodeError("evaluation points must be distinct")
        if len(lam) != n or 0 in lam:
            raise CodeError("need n nonzero multipliers")
        if not 1 <= self.k < n <= f.order:
            raise CodeError(f"invalid parameters n={n}, k={self.k}")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def r(self) -> int:
        return self.n - self.k

    def generator(self) -> GeneratorMatrix:
        f = self.field
        rows = np.zeros((self.k, self.n), dtype=np.int64)
        for j, (a, lmb) in enumerate(zip(self.A, self.lam)):
            for i in range(self.k):
                rows[i, j] = f.mul(lmb, f.pow(a, i))
        return GeneratorMatrix(f, rows)

    def evaluate(self, f_poly: Polynomial) -> list[int]:
        if f_poly.degree >= self.k:
            raise CodeError("message polynomial degree must be below k")
        return [self.field.mul(lmb, f_poly(a)) for a, lmb in zip(self.A, self.lam)]

    def encode(self, u: Sequence[int]) -> list[int]:
        """Codeword of the message polynomial with coefficients ``u``."""
        if len(u) != self.k:
            raise CodeError(f"message has {len(u)} symbols, expected {self.k}")
        return self.evaluate(Polynomial(self.field, u))

    def random_codewords(self, count: int, rng: np.random.Generator) -> np.ndarray:
        msgs = rng.integers(0, self.field.order, size=(count, self.k))
        return self.generator().encode_many(msgs)

    def dual(self, normalize: bool = False) -> "GrsCode":
        """GRS(A, n-k, gamma) with gamma_j = 1 / (lam_j * prod_{s != j} (a_j - a_s)).

        With ``normalize`` the multipliers are rescaled so that gamma_n == 1;
        the code itself does not change.
        """
        f = self.field
        gamma = []
        for j, a in enumerate(self.A):
            d = f.prod(a ^ b for s, b in enumerate(self.A) if s != j)
            gamma.append(f.inv(f.mul(self.lam[j], d)))
        if normalize:
            s = f.inv(gamma[-1])
            gamma = [f.mul(s, g) for g in gamma]
        return GrsCode(f, self.A, self.n - self.k, tuple(gamma), name=f"{self.name}-dual")

    def parity_check(self) -> GeneratorMatrix:
        return self.dual().generator()

    def is_codeword(self, c: Sequence[int]) -> bool:
        h = self.parity_check().rows
        return not np.any(mat_mul(self.field, h, np.asarray(c, dtype=np.int64)[:, None]))

    def same_code(self, other: "GrsCode | GeneratorMatrix") -> bool:
        g = other.generator() if isinstance(other, GrsCode) else other
        return self.generator().same_code(g)

    def with_points(self, A: Sequence[int], name: str | None = None) -> "GrsCode":
        return GrsCode(self.field, tuple(A), self.k, self.lam, name or self.name)


def decode_erasures(g: GeneratorMatrix, positions: Sequence[int], symbols: Sequence[int]) -> list[int]:
    """Recover the full codeword from any k surviving coordinates."""
    positions = list(positions)
    if len(positions) != g.k:
        raise CodeError("need exactly k surviving positions")
    sub = g.rows[:, positions]
    u = mat_mul(g.field, np.asarray([symbols]), mat_inv(g.field, sub))[0]
    return g.encode([int(x) for x in u])


def int_points(n: int, f: GF = GF256) -> tuple[int, ...]:
    if n > f.order:
        raise CodeError(f"n={n} exceeds the field order")
    return tuple(range(n))


def f16_points(n: int, f: GF = GF256) -> tuple[int, ...]:
    """{0, 1, z16, ..., z16^(n-2)} with z16 embedded into ``f``."""
    from .galois import GF16, embedding

    if not 2 <= n <= 16:
        raise CodeError("the GF(16) family needs 2 <= n <= 16")
    pts = [0] + [GF16.exp_to_int(i) for i in range(n - 1)]
    if f is GF16:
        return tuple(pts)
    emb = embedding(GF16, f)
    return tuple(emb(p) for p in pts)


def classical_rs(f: GF, A: Iterable[int], k: int, name: str = "classical") -> GrsCode:
    return GrsCode(f, tuple(A), k, name=name)


def isal_code(n: int, k: int) -> GrsCode:
    """The Cauchy-systematic library code as a GRS code on A = [0, n-1]."""
    return cauchy_to_grs(n, k)


FAMILIES = ("isal", "f16", "genpoly", "classical")


def family_code(family: str, n: int, k: int, f: GF = GF256) -> GrsCode:
    """isal: Cauchy code on [0, n-1]; f16: RS on {0, 1, z16, ...}; genpoly; classical: RS on [0, n-1]."""
    if family == "isal":
        if f is not GF256:
            raise CodeError("the library code lives over GF(256)")
        return isal_code(n, k)
    if family == "f16":
        return classical_rs(f, f16_points(n, f), k, name="f16")
    if family == "genpoly":
        return genpoly_code(n, n - k, f)
    if family == "classical":
        return classical_rs(f, int_points(n, f), k)
    raise CodeError(f"unknown family {family!r}")


def cauchy_systematic(n: int, k: int, f: GF = GF256) -> GeneratorMatrix:
    """[I_k | C] with C[i][j] = 1 / (x_i + y_j), x_i = i, y_j = k + j."""
    if n > f.order:
        raise CodeError(f"n={n} exceeds the field order")
    if not 1 <= k < n:
        raise CodeError("need 1 <= k < n")
    c = np.array([[f.inv(i ^ (k + j)) for j in range(n - k)] for i in range(k)], dtype=np.int64)
    return GeneratorMatrix(f, np.hstack([np.eye(k, dtype=np.int64), c]))


def cauchy_to_grs(n: int, k: int, f: GF = GF256) -> GrsCode:
    if n > f.order:
        raise CodeError(f"n={n} exceeds the field order")
    xs = list(range(k))
    lam = []
    for j in range(n):
        if j < k:
            d = f.prod(xs[s] ^ j for s in range(k) if s != j)
        else:
            d = f.prod(x ^ j for x in xs)
        lam.append(f.inv(d))
    return GrsCode(f, tuple(range(n)), k, tuple(lam), name="cauchy")


def vandermonde(f: GF, points: Sequence[int], rows: int) -> np.ndarray:
    return np.array([[f.pow(a, i) for a in points] for i in range(rows)], dtype=np.int64)


def backblaze_code(n: int, k: int, f: GF = GF256) -> GeneratorMatrix:
    """V1^{-1} V for the k x n Vandermonde matrix V on [0, n-1]."""
    v = vandermonde(f, int_points(n, f), k)
    try:
        v1inv = mat_inv(f, v[:, :k])
    except np.linalg.LinAlgError:  # pragma: no cover - distinct points
        raise AssertionError("leading Vandermonde block is singular")
    return GeneratorMatrix(f, mat_mul(f, v1inv, v))


def vand_systematic(n: int, k: int, f: GF = GF256) -> GeneratorMatrix:
    """[I_k | V] with V[i][j] = x_j^i, x_j = z^j; not MDS in general."""
    v = vandermonde(f, [f.exp_to_int(j) for j in range(n - k)], k)
    return GeneratorMatrix(f, np.hstack([np.eye(k, dtype=np.int64), v]))


def generator_polynomial(r: int, f: GF = GF256) -> Polynomial:
    return Polynomial.from_roots(f, [f.exp_to_int(i) for i in range(r)])


def genpoly_code(n: int, r: int, f: GF = GF256) -> GrsCode:
    """Cyclic-style code of multiples of g(x) = prod_{i<r} (x - z^i), deg < n.

    Coordinate i holds the coefficient of x^i, so position i corresponds to
    the evaluation point z^i and the code is the dual of RS({z^i}, r).
    """
    if n > f.order - 1:
        raise CodeError("n must be at most 255")
    A = tuple(f.exp_to_int(i) for i in range(n))
    code = classical_rs(f, A, r).dual()
    return GrsCode(f, code.A, code.k, code.lam, name="genpoly")


def genpoly_parity_check(n: int, r: int, f: GF = GF256) -> GeneratorMatrix:
    return GeneratorMatrix(f, vandermonde(f, [f.exp_to_int(i) for i in range(n)], r))


def find_vand_systematic_failure(max_n: int = 32, f: GF = GF256):
    """Smallest n (then k) where [I_k | V] fails MDS, with the singular minor."""
    for n in range(2, max_n + 1):
        for k in range(1, n):
            g = vand_systematic(n, k, f)
            minor = find_singular_minor(g.rows[:, k:], f)
            if minor is not None:
                return n, k, minor
    return None


# descriptor line format


def format_code(code: GrsCode) -> str:
    ints = lambda xs: ",".join(str(x) for x in xs)  # noqa: E731
    return (
        f"code {code.name} field={code.field.name} n={code.n} k={code.k} "
        f"A={ints(code.A)} lambda={ints(code.lam)}"
    )


def parse_code(line: str) -> GrsCode:
    parts = line.split()
    if len(parts) < 2 or parts[0] != "code":
        raise CodeError(f"not a code descriptor: {line!r}")
    kv = dict(p.split("=", 1) for p in parts[2:])
    try:
        f = get_field(kv["field"])
        A = tuple(int(x) for x in kv["A"].split(","))
        lam = tuple(int(x) for x in kv["lambda"].split(","))
        n, k = int(kv["n"]), int(kv["k"])
    except (KeyError, ValueError) as exc:
        raise CodeError(f"bad code descriptor: {line!r}") from exc
    if len(A) != n:
        raise CodeError("descriptor n does not match A")
    return GrsCode(f, A, k, lam, name=parts[1])
