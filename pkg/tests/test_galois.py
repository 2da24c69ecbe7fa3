from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rslab.galois import (
    GF2,
    GF4,
    GF16,
    GF256,
    Element,
    FieldMismatchError,
    SubfieldError,
    add,
    dual_basis,
    embedding,
    field,
    gf2_echelon,
    gf2_rank,
    gf2_solve,
    mat_inv,
    mat_mul,
    rank_over,
    span_over,
    subspace_poly,
)

import oracles

TOWER = [GF2, GF4, GF16, GF256]
PAIRS = [(F, K) for F in TOWER for K in TOWER if F.m % K.m == 0]
byte = st.integers(0, 255)


@pytest.mark.parametrize("f", TOWER, ids=lambda f: f.name)
def test_products_match_polynomial_oracle(f):
    a, b = np.meshgrid(np.arange(f.order), np.arange(f.order), indexing="ij")
    want = oracles.polymul_vec(a.ravel(), b.ravel(), f.m).reshape(a.shape)
    assert np.array_equal(f.mul_table.astype(np.int64), want)


@pytest.mark.parametrize("f", TOWER, ids=lambda f: f.name)
def test_log_and_antilog_are_inverse(f):
    for e in range(f.order - 1):
        assert f.int_to_exp(f.exp_to_int(e)) == e
    for a in range(1, f.order):
        assert f.exp_to_int(f.int_to_exp(a)) == a
    with pytest.raises(ValueError):
        f.int_to_exp(0)


def test_golden_exponents():
    assert GF256.exp_to_int(0) == 1
    assert GF256.exp_to_int(229) == 122
    assert GF256.exp_to_int(25) == 3
    assert oracles.z_power(229, 8) == 122
    # 122 = 01111010 read LSB-first as a bit vector
    assert Element(122, GF256).bits == (0, 1, 0, 1, 1, 1, 1, 0)


def test_add_examples():
    assert add(Element(6, GF256), Element(3, GF256)).value == 5
    assert add(Element(122, GF256), Element(186, GF256)).value == 192
    assert int(Element(9, GF16) + Element(9, GF16)) == 0


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        Element(3, GF16) * Element(3, GF256)
    with pytest.raises(FieldMismatchError):
        Element(3, GF16) + Element(3, GF256)


@given(byte)
def test_identity_and_annihilator(a):
    assert GF256.mul(a, 1) == a
    assert GF256.mul(a, 0) == 0
    if a:
        assert GF256.mul(a, GF256.inv(a)) == 1


def test_field_names():
    assert field("gf16") is GF16
    assert field(8) is GF256
    with pytest.raises(ValueError):
        field("gf8")


@pytest.mark.parametrize("F,K", PAIRS, ids=lambda x: x.name)
def test_trace_matches_repeated_squaring(F, K):
    emb = embedding(K, F)
    for a in range(F.order):
        assert emb(F.trace(a, K)) == oracles.trace(a, F.m, K.m)


def test_trace_balance_over_gf2():
    tr = GF256.trace_table(GF2)
    assert np.count_nonzero(tr == 0) == 128 and np.count_nonzero(tr == 1) == 128
    assert GF256.trace(0) == 0


def test_trace_additive_exhaustive():
    tr = GF256.trace_table(GF2)
    a, b = np.meshgrid(np.arange(256), np.arange(256))
    assert np.array_equal(tr[a ^ b], tr[a] ^ tr[b])


def test_trace_of_product_is_linear_in_bits():
    """For each a, x -> Tr(a x) equals the parity of x & mask_a."""
    tr = GF256.trace_table(GF2)
    xs = np.arange(256)
    parity = np.array([bin(v).count("1") & 1 for v in range(256)])
    for a in range(256):
        mask = sum(int(tr[GF256.mul(a, 1 << t)]) << t for t in range(8))
        assert np.array_equal(tr[GF256.mul_table[a, xs]], parity[xs & mask])


@pytest.mark.parametrize("F,K,L", [(GF256, GF16, GF2), (GF256, GF4, GF2), (GF16, GF4, GF2), (GF256, GF16, GF4)])
def test_trace_transitivity(F, K, L):
    embK = embedding(K, F)
    for a in range(F.order):
        inner = F.trace(a, K)
        assert K.trace(inner, L) == F.trace(a, L)
        assert embK.preimage[embK(inner)] == inner


@pytest.mark.parametrize("K,F", [(K, F) for F, K in PAIRS if K is not F], ids=lambda x: x.name)
def test_embedding_is_homomorphism(K, F):
    emb = embedding(K, F)
    assert emb(0) == 0 and emb(1) == 1
    for a, b in itertools.product(range(K.order), repeat=2):
        assert emb(a ^ b) == emb(a) ^ emb(b)
        assert emb(K.mul(a, b)) == F.mul(emb(a), emb(b))
    # image equals the fixed field of x -> x^|K|, found without the library
    assert sorted(emb.image.tolist()) == sorted(oracles.subfield(F.m, K.m))


def test_embedding_pins_gf16_generator():
    emb = embedding(GF16, GF256)
    g = emb(2)
    assert g == GF256.exp_to_int(17)
    # order 15 and root of z^4 + z + 1
    assert GF256.pow(g, 15) == 1 and all(GF256.pow(g, e) != 1 for e in (3, 5))
    assert GF256.pow(g, 4) ^ g ^ 1 == 0
    assert embedding(GF4, GF256)(2) == GF256.exp_to_int(85)


def test_rank_examples():
    assert rank_over(GF256, [0], GF2) == 0
    assert rank_over(GF256, [GF256.exp_to_int(t) for t in range(8)], GF2) == 8
    U = [1, GF256.exp_to_int(17), GF256.exp_to_int(34)]
    assert rank_over(GF256, U, GF16) == oracles.kcoord_rank(U, 8, 4) == 1
    U = [1, GF256.exp_to_int(1), GF256.exp_to_int(34)]
    assert rank_over(GF256, U, GF16) == oracles.kcoord_rank(U, 8, 4) == 2


@settings(max_examples=150, deadline=None)
@given(st.lists(byte, min_size=1, max_size=3), st.sampled_from([GF2, GF4, GF16]))
def test_rank_matches_coordinate_oracle(U, K):
    assert rank_over(GF256, U, K) == oracles.kcoord_rank(U, 8, K.m)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 15), min_size=1, max_size=4))
def test_rank_matches_span_enumeration(U):
    assert rank_over(GF16, U, GF2) == oracles.rank(U, 4, 1)
    assert rank_over(GF16, U, GF4) == oracles.rank(U, 4, 2)
    assert span_over(GF16, U, GF4) == oracles.span(U, 4, 2)


@settings(max_examples=100, deadline=None)
@given(st.lists(byte, min_size=1, max_size=4), st.randoms(use_true_random=False), st.integers(1, 255))
def test_rank_invariances(U, rnd, c):
    base = rank_over(GF256, U, GF16)
    perm = list(U)
    rnd.shuffle(perm)
    assert rank_over(GF256, perm, GF16) == base
    # scaling the whole set by any nonzero element is a K-linear bijection
    assert rank_over(GF256, [GF256.mul(c, u) for u in U], GF16) == base
    # scaling one element keeps the rank when the scalar lies in K
    k = embedding(GF16, GF256)(c % 15 + 1)
    assert rank_over(GF256, [GF256.mul(k, U[0])] + U[1:], GF16) == base


def test_rank_changes_under_elementwise_scaling_outside_base():
    U = [1, GF256.exp_to_int(17)]  # both in GF(16): rank 1
    assert rank_over(GF256, U, GF16) == 1
    V = [1, GF256.mul(GF256.exp_to_int(1), U[1])]  # scale one element by z, not in GF(16)
    assert rank_over(GF256, V, GF16) == 2
    W = [1, GF256.mul(GF256.exp_to_int(17), U[1])]  # scale by a GF(16) element
    assert rank_over(GF256, W, GF16) == 1


def test_gf2_rank_matches_elimination():
    rng = np.random.default_rng(1)
    vecs = rng.integers(0, 256, size=(500, 5))
    got = gf2_rank(vecs, 8)
    assert got.tolist() == [oracles.rank_gf2_elim(v) for v in vecs]


@settings(max_examples=100, deadline=None)
@given(st.lists(byte, min_size=1, max_size=8), byte)
def test_echelon_and_solve(vecs, v):
    basis = gf2_echelon(vecs, 8)
    assert len(basis) == oracles.rank_gf2_elim(vecs)
    leads = [b.bit_length() - 1 for b in basis]
    assert leads == sorted(leads, reverse=True)
    for b in basis:
        assert all(not (b >> l & 1) for l in leads if l != b.bit_length() - 1)
    s = gf2_solve(basis, v)
    in_span = oracles.rank_gf2_elim(vecs + [v]) == len(basis)
    assert (s is not None) == in_span
    if s is not None:
        acc = 0
        for t, b in enumerate(basis):
            if s >> t & 1:
                acc ^= b
        assert acc == v


def test_dual_basis_polynomial_basis_brute_force():
    B = [GF256.exp_to_int(t) for t in range(8)]
    D = dual_basis(GF256, B)
    assert D == oracles.dual_basis_brute(B, 8)
    assert dual_basis(GF256, D) == B


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 255), min_size=8, max_size=8, unique=True))
def test_dual_basis_defining_property(B):
    if rank_over(GF256, B, GF2) < 8:
        with pytest.raises(SubfieldError):
            dual_basis(GF256, B)
        return
    D = dual_basis(GF256, B)
    for i, j in itertools.product(range(8), repeat=2):
        assert GF256.trace(GF256.mul(B[i], D[j])) == (i == j)
    assert dual_basis(GF256, D) == B


def test_dual_basis_over_gf16():
    B = [1, GF256.exp_to_int(1)]
    D = dual_basis(GF256, B, GF16)
    for i, j in itertools.product(range(2), repeat=2):
        assert GF256.trace(GF256.mul(B[i], D[j]), GF16) == (i == j)


def test_subspace_poly_examples():
    assert subspace_poly(GF256, [0]).coeffs == (0, 1)
    assert subspace_poly(GF256, [0, 1]).coeffs == (0, 1, 1)
    W = list(embedding(GF4, GF256).image)
    p = subspace_poly(GF256, W)
    assert list(p.coeffs) == oracles.poly_from_roots(W, 8)
    assert p.degree == 4 and p.coeffs[3] == 0 and p.coeffs[0] == 0
    # GF(4) is the root set of x^4 - x
    assert p.coeffs == (0, 1, 0, 0, 1)


def test_subspace_poly_linearized_over_gf4():
    z = GF256.exp_to_int(1)
    omega = GF256.exp_to_int(85)
    W = span_over(GF256, [1, z], GF4)
    p = subspace_poly(GF256, W, GF4)
    assert p.degree == 16
    assert all(c == 0 for e, c in enumerate(p.coeffs) if e not in (1, 4, 16))
    for x in range(0, 256, 7):
        assert p(GF256.mul(omega, x)) == GF256.mul(omega, p(x))


def test_subspace_poly_rejects_non_subspace():
    with pytest.raises(SubfieldError):
        subspace_poly(GF256, [0, 1, 2])
    with pytest.raises(SubfieldError):
        subspace_poly(GF256, [0, 1], GF4)


def test_matrix_ops():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = rng.integers(0, 256, size=(3, 3))
        det = oracles.det_leibniz(m.tolist(), 8)
        if det == 0:
            with pytest.raises(np.linalg.LinAlgError):
                mat_inv(GF256, m)
            continue
        inv = mat_inv(GF256, m)
        assert mat_mul(GF256, m, inv).tolist() == np.eye(3, dtype=int).tolist()
        assert mat_mul(GF256, m, inv).tolist() == oracles.mat_mul(m.tolist(), inv.tolist(), 8)
