"""Reference repair bandwidths in bits for RS(n, n-r) over GF(256), 4 <= n <= 16.

Columns: default (8k), ISA-L heuristic, F16-based algebraic, F16-based heuristic.
"""

from __future__ import annotations

COLUMNS = ("default", "isal", "f16_algebraic", "f16")

REFERENCE: dict[int, dict[int, tuple[int, int, int, int]]] = {
    2: {
        4: (16, 12, 18, 12),
        5: (24, 18, 24, 18),
        6: (32, 24, 30, 24),
        7: (40, 32, 36, 30),
        8: (48, 38, 42, 38),
        9: (56, 44, 48, 44),
        10: (64, 50, 54, 50),
        11: (72, 58, 60, 56),
        12: (80, 64, 66, 64),
        13: (88, 72, 72, 70),
        14: (96, 80, 78, 76),
        15: (104, 84, 84, 84),
        16: (112, 90, 90, 90),
    },
    3: {
        4: (8, 8, 18, 8),
        5: (16, 12, 24, 12),
        6: (24, 16, 30, 16),
        7: (32, 22, 36, 22),
        8: (40, 28, 42, 28),
        9: (48, 34, 48, 32),
        10: (56, 40, 54, 40),
        11: (64, 46, 60, 46),
        12: (72, 52, 66, 52),
        13: (80, 58, 72, 58),
        14: (88, 66, 78, 64),
        15: (96, 72, 84, 70),
        16: (104, 78, 90, 76),
    },
    4: {
        5: (8, 8, 16, 8),
        6: (16, 12, 20, 12),
        7: (24, 16, 24, 16),
        8: (32, 22, 28, 22),
        9: (40, 28, 32, 26),
        10: (48, 36, 36, 32),
        11: (56, 42, 40, 38),
        12: (64, 48, 44, 44),
        13: (72, 54, 48, 48),
        14: (80, 62, 52, 52),
        15: (88, 68, 56, 56),
        16: (96, 60, 60, 60),
    },
}


def reference(n: int, r: int, column: str = "isal") -> int | None:
    row = REFERENCE.get(r, {}).get(n)
    if row is None:
        return None
    return row[COLUMNS.index(column)]


def reduction(bits: int, k: int) -> float:
    """Percent change against the naive 8k bits (negative is a saving)."""
    return -100.0 * (1 - bits / (8 * k))


def format_reduction(bits: int, k: int) -> str:
    """One decimal, trailing .0 dropped: -25%, -20.8%, +12.5%, -0%."""
    pct = round(reduction(bits, k), 1)
    text = f"{abs(pct):.1f}".removesuffix(".0")
    return ("+" if pct > 0 else "-") + text + "%"
