"""Check-polynomial candidates: degree r-1 with all r-1 roots taken from A."""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import numpy as np

from ..galois import GF
from ..poly import Polynomial


def coset_reps(f: GF, base: GF) -> list[int]:
    """Representatives z^t of F*/K*; scaling by K* never changes a K-rank."""
    return [f.exp_to_int(t) for t in range((f.order - 1) // (base.order - 1))]


def root_multisets(A: Sequence[int], r: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations_with_replacement(tuple(A), r - 1)


def gen_candidates(
    f: GF, A: Sequence[int], r: int, scalar_policy: str = "monic", base: GF | None = None
) -> Iterator[Polynomial]:
    """c * prod (x - a_t) over multisets {a_t} of size r-1 in A.

    ``scalar_policy`` is "monic" (c = 1) or "all" (every nonzero c).  With a
    ``base`` given, "all" is restricted to coset representatives of F*/K*.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if scalar_policy == "monic":
        scalars = [1]
    elif scalar_policy == "all":
        scalars = coset_reps(f, base) if base is not None else list(range(1, f.order))
    else:
        raise ValueError(f"unknown scalar policy {scalar_policy!r}")
    seen = set()
    for roots in root_multisets(A, r):
        mono = Polynomial.from_roots(f, roots)
        for c in scalars:
            p = mono * c
            if p.coeffs not in seen:
                seen.add(p.coeffs)
                yield p


def evaluation_matrix(polys: Sequence[Polynomial], A: Sequence[int]) -> np.ndarray:
    return np.array([p.evaluate(A) for p in polys], dtype=np.int64)
