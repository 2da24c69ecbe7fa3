from __future__ import annotations

import pytest

from rslab.galois import GF16, GF256
from rslab.grs import family_code
from rslab.repair import lift
from rslab.search.degree_four import degree_four_search
from rslab.search.exhaustive import SearchConfig, exhaustive_search


def lifted_f16(n: int, k: int) -> dict:
    """Exhaustive GF(16) search for the F16 family, lifted onto the GF(256) code."""
    res = exhaustive_search(SearchConfig(family_code("f16", n, k, GF16)))
    big = family_code("f16", n, k, GF256)
    return {j: lift(s, GF256, code=big) for j, s in res.schemes.items()}


@pytest.fixture(scope="session")
def rs53_lifted():
    return lifted_f16(5, 3)


@pytest.fixture(scope="session")
def isal96():
    return degree_four_search(SearchConfig(family_code("isal", 9, 6)))


@pytest.fixture(scope="session")
def genpoly14():
    return degree_four_search(SearchConfig(family_code("genpoly", 14, 10)))


@pytest.fixture(scope="session")
def isal128():
    return degree_four_search(SearchConfig(family_code("isal", 12, 8)))
