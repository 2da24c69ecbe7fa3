from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rslab.galois import GF16, GF256, mat_mul
from rslab.grs import (
    CodeError,
    GeneratorMatrix,
    GrsCode,
    backblaze_code,
    cauchy_systematic,
    cauchy_to_grs,
    classical_rs,
    decode_erasures,
    f16_points,
    family_code,
    find_vand_systematic_failure,
    format_code,
    generator_polynomial,
    genpoly_code,
    genpoly_parity_check,
    int_points,
    is_mds,
    parse_code,
    vand_systematic,
)
from rslab.poly import Polynomial

import oracles

z = GF256.exp_to_int
CAUCHY_96 = [
    [122, 186, 173],
    [186, 122, 157],
    [71, 167, 221],
    [167, 71, 152],
    [142, 244, 61],
    [244, 142, 170],
]
LAMBDA_96 = [177, 177, 5, 5, 234, 234, 208, 208, 119]
GAMMA_96 = [47, 82, 171, 239, 221, 144, 75, 199, 0]


def test_poly_eval_and_roots():
    roots = [3, 7, 200]
    p = Polynomial.from_roots(GF256, roots)
    assert list(p.coeffs) == oracles.poly_from_roots(roots, 8)
    for x in range(256):
        assert p(x) == oracles.poly_eval(p.coeffs, x, 8)
    assert Polynomial(GF256, [5, 0, 0]).degree == 0
    assert Polynomial.zero(GF256).degree < 0


def test_poly_affine_composition():
    p = Polynomial(GF256, [9, 31, 4])
    q = p.compose_affine(17, 90)
    for x in range(0, 256, 5):
        assert q(x) == p(GF256.mul(17, x) ^ 90)


def test_single_parity_code():
    code = classical_rs(GF256, [0, 1], 1)
    assert code.generator().rows.tolist() == [[1, 1]]
    H = code.parity_check().rows
    # the dual multipliers are (1, 1) up to scale
    assert H.shape == (1, 2) and H[0, 0] == H[0, 1]
    with pytest.raises(CodeError):
        classical_rs(GF256, [0, 1], 2)
    with pytest.raises(CodeError):
        classical_rs(GF256, [0, 0, 1], 1)


def test_point_families():
    assert int_points(9) == tuple(range(9))
    assert family_code("isal", 9, 6).A == tuple(range(9))
    emb17 = [0, 1] + [z(17 * i) for i in range(1, 7)]
    assert f16_points(8) == tuple(emb17)
    assert f16_points(5, GF16) == (0, 1, 2, 4, 8)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 255), min_size=6, max_size=6))
def test_encode_matches_horner(u):
    code = family_code("isal", 9, 6)
    c = code.generator().encode(u)
    for j, (a, lam) in enumerate(zip(code.A, code.lam)):
        assert c[j] == oracles.polymul(lam, oracles.poly_eval(u, a, 8), 8)
    assert code.encode(u) == c
    assert code.generator().encode([0] * 6) == [0] * 9


def test_systematic_encode_keeps_message():
    G = cauchy_systematic(9, 6)
    u = [1, 2, 3, 4, 5, 250]
    assert G.encode(u)[:6] == u
    with pytest.raises(CodeError):
        G.encode([1, 2])


def test_cauchy_block_golden():
    G = cauchy_systematic(9, 6)
    assert G.rows[:, 6:].tolist() == CAUCHY_96
    assert [GF256.int_to_exp(x) for x in G.rows[0, 6:]] == [229, 57, 252]
    G1 = cauchy_systematic(4, 1)
    assert G1.rows[0, 1:].tolist() == [GF256.inv(y) for y in (1, 2, 3)]


def test_cauchy_grs_golden():
    code = cauchy_to_grs(9, 6)
    assert [GF256.int_to_exp(x) for x in code.lam] == LAMBDA_96
    assert code.A == (0, 1, z(1), z(25), z(2), z(50), z(26), z(198), z(3))
    g = code.dual(normalize=True)
    assert [GF256.int_to_exp(x) for x in g.lam] == GAMMA_96


@pytest.mark.parametrize("n", range(4, 17))
def test_cauchy_constructions_agree(n):
    for k in range(1, n):
        assert cauchy_to_grs(n, k).same_code(cauchy_systematic(n, k))


def _random_messages(code, count, seed):
    return np.random.default_rng(seed).integers(0, code.field.order, size=(count, code.k))


def test_dual_closed_form_against_nullspace():
    for code in [cauchy_to_grs(9, 6), genpoly_code(12, 4), classical_rs(GF16, [0, 1, 2, 9, 5], 3)]:
        f = code.field
        G, H = code.generator().rows, code.dual().generator().rows
        prod = oracles.mat_mul(G.tolist(), H.T.tolist(), f.m)
        assert all(v == 0 for row in prod for v in row)
        assert oracles.nullspace_dim(G.tolist(), f.m) == code.n - code.k
        assert oracles.mat_rank(H.tolist(), f.m) == code.n - code.k


def test_biduality_and_orthogonality():
    rng = np.random.default_rng(5)
    code = cauchy_to_grs(10, 7)
    assert code.dual().dual().same_code(code)
    gamma = code.dual().lam
    for _ in range(50):
        fc = rng.integers(0, 256, code.k)
        gc = rng.integers(0, 256, code.r)
        acc = 0
        for a, lam, gm in zip(code.A, code.lam, gamma):
            fa = oracles.poly_eval(fc, a, 8)
            ga = oracles.poly_eval(gc, a, 8)
            acc ^= oracles.polymul(oracles.polymul(gm, ga, 8), oracles.polymul(lam, fa, 8), 8)
        assert acc == 0


def test_normalized_dual_is_same_code():
    code = cauchy_to_grs(9, 6)
    assert code.dual(normalize=True).same_code(code.dual())
    assert code.dual(normalize=True).lam[-1] == 1


@pytest.mark.parametrize("n", range(4, 17))
def test_backblaze_is_classical_rs(n):
    for k in range(1, n):
        G = backblaze_code(n, k)
        assert G.is_systematic()
        assert G.same_code(classical_rs(GF256, int_points(n), k).generator())


def test_backblaze_differs_from_isal():
    assert not backblaze_code(9, 6).same_code(cauchy_to_grs(9, 6).generator())


def test_genpoly():
    n, r = 14, 4
    code = genpoly_code(n, r)
    g = generator_polynomial(r)
    padded = list(g.coeffs) + [0] * (n - len(g.coeffs))
    assert code.is_codeword(padded)
    H = genpoly_parity_check(n, r)
    assert oracles.mat_rank(H.rows.tolist(), 8) == r
    msgs = _random_messages(code, 20, 1)
    for c in code.generator().encode_many(msgs):
        for i in range(r):
            assert oracles.poly_eval(c, z(i), 8) == 0
    # codewords of multiples of g(x)
    for m in msgs[:5]:
        prod = Polynomial(GF256, m[: n - r]) * g
        assert code.is_codeword(list(prod.coeffs) + [0] * (n - len(prod.coeffs)))
    # same code as the null space of H
    assert code.dual().same_code(H)
    assert code.k == n - r


def test_mds_checks():
    g = vand_systematic(9, 6)
    assert is_mds(g)
    assert is_mds(cauchy_systematic(9, 6))
    assert classical_rs(GF256, range(7), 3).generator().is_mds()


def test_vand_systematic_failure_has_singular_minor():
    n, k, (rows, cols) = find_vand_systematic_failure()
    g = vand_systematic(n, k)
    assert not is_mds(g)
    sub = g.rows[:, k:][np.ix_(rows, cols)]
    assert oracles.det_leibniz(sub.tolist(), 8) == 0
    # every smaller (n, k) passes the brute-force minor check
    for n2 in range(2, n):
        for k2 in range(1, n2):
            V = vand_systematic(n2, k2).rows[:, k2:]
            for t in range(1, min(k2, n2 - k2) + 1):
                for rs in itertools.combinations(range(k2), t):
                    for cs in itertools.combinations(range(n2 - k2), t):
                        assert oracles.det_leibniz(V[np.ix_(rs, cs)].tolist(), 8) != 0


@pytest.mark.parametrize("family", ["isal", "f16", "genpoly", "classical"])
def test_erasure_decoding(family):
    n, k = 9, 6
    code = family_code(family, n, k)
    G = code.generator()
    rng = np.random.default_rng(7)
    for c in code.random_codewords(100, rng):
        keep = sorted(rng.choice(n, k, replace=False).tolist())
        assert decode_erasures(G, keep, [int(c[i]) for i in keep]) == c.tolist()


def test_descriptor_round_trip():
    code = family_code("genpoly", 14, 10)
    line = format_code(code)
    assert line.startswith("code genpoly field=gf256 n=14 k=10 A=")
    assert parse_code(line) == code
    with pytest.raises(CodeError):
        parse_code("code x field=gf256 n=3 k=1 A=0,1 lambda=1,1")
    with pytest.raises(CodeError):
        parse_code("nonsense")


def test_generator_matrix_immutable():
    G = GeneratorMatrix(GF256, [[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        G.rows[0, 0] = 9
    assert mat_mul(GF256, np.eye(2, dtype=int), G.rows).tolist() == [[1, 2], [3, 4]]
