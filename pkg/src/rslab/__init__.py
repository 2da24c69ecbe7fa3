"""Trace repair for Reed-Solomon codes over GF(256).

Submodules: ``galois`` (field tower and subfield linear algebra), ``poly``,
``grs`` (code constructions), ``repair`` (check sets and repair schemes),
``search`` (scheme search and the rank-profile census), ``codec`` (lookup-table
repair and the naive baseline) and ``cli``.
"""

from __future__ import annotations

from .galois import GF, GF2, GF4, GF16, GF256, Element, field
from .grs import GeneratorMatrix, GrsCode, classical_rs, family_code
from .poly import Polynomial
from .repair import CheckSet, RepairScheme, make_scheme, naive_scheme, trace_repair, verify_scheme

__version__ = "0.1.0"

__all__ = [
    "GF", "GF2", "GF4", "GF16", "GF256", "Element", "field",
    "Polynomial",
    "GeneratorMatrix", "GrsCode", "classical_rs", "family_code",
    "CheckSet", "RepairScheme", "make_scheme", "naive_scheme", "trace_repair", "verify_scheme",
]
