"""Univariate polynomials over a tower field, coefficients low degree first."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .galois import GF, SubfieldEmbedding


@dataclass(frozen=True)
class Polynomial:
    field: GF
    coeffs: tuple[int, ...]

    def __init__(self, field: GF, coeffs: Iterable[int]):
        c = [field.check(int(x)) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def zero(cls, field: GF) -> "Polynomial":
        return cls(field, ())

    @classmethod
    def constant(cls, field: GF, c: int) -> "Polynomial":
        return cls(field, (c,))

    @classmethod
    def x(cls, field: GF) -> "Polynomial":
        return cls(field, (0, 1))

    @classmethod
    def from_roots(cls, field: GF, roots: Iterable[int], scale: int = 1) -> "Polynomial":
        p = cls(field, (scale,))
        for a in roots:
            p = p * cls(field, (a, 1))
        return p

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: int) -> int:
        f = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.mul(acc, x) ^ c
        return acc

    def evaluate(self, points: Sequence[int] | np.ndarray) -> np.ndarray:
        """Vectorized Horner evaluation at many points."""
        pts = np.asarray(points, dtype=np.int64)
        acc = np.zeros_like(pts)
        mt = self.field.mul_table
        for c in reversed(self.coeffs):
            acc = mt[acc, pts].astype(np.int64) ^ c
        return acc

    def _check(self, other: "Polynomial") -> None:
        if other.field is not self.field:
            raise ValueError("polynomials over different fields")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial(self.field, [x ^ (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __sub__ = __add__

    def __mul__(self, other: "Polynomial | int") -> "Polynomial":
        f = self.field
        if isinstance(other, int):
            return Polynomial(f, [f.mul(other, c) for c in self.coeffs])
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Polynomial.zero(f)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] ^= f.mul(a, b)
        return Polynomial(f, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        out = Polynomial.constant(self.field, 1)
        for _ in range(e):
            out = out * self
        return out

    def compose_affine(self, a: int, b: int) -> "Polynomial":
        """p(a*x + b)."""
        f = self.field
        lin = Polynomial(f, (b, a))
        out = Polynomial.zero(f)
        for c in reversed(self.coeffs):
            out = out * lin + Polynomial.constant(f, c)
        return out

    def embed(self, emb: SubfieldEmbedding) -> "Polynomial":
        if emb.source is not self.field:
            raise ValueError("embedding source does not match polynomial field")
        return Polynomial(emb.target, [emb(c) for c in self.coeffs])

    def monic(self) -> "Polynomial":
        if self.is_zero():
            raise ValueError("zero polynomial has no monic multiple")
        return self * self.field.inv(self.coeffs[-1])

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return " + ".join(terms)
